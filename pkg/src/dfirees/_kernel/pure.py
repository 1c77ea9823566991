"""Pure-Python hot-loop kernel for packed-exponent polynomial arithmetic.

An engine polynomial is a tuple of ``(monomial, coefficient)`` pairs sorted
by monomial descending.  Monomials are ints with fixed-width exponent
fields, so multiplication is integer addition and the active term order is
integer comparison; divisibility is a subtraction plus a guard-bit test.
Coefficients are ints: arbitrary-precision for exact rational work (the
polynomial is kept primitive, i.e. content-free), or residues in ``[0, p)``
when a prime is given.

The Cython module ``_speedups`` implements the same functions; callers pick
the implementation through ``dfirees._kernel``.
"""

from math import gcd

IMPL = "pure"


def mono_divides(a, b, guard):
    """Whether packed monomial ``a`` divides ``b``."""
    d = b - a
    return d >= 0 and not (d & guard)


def primitive(p):
    """Divide out the integer content and make the leading coefficient positive."""
    if not p:
        return ()
    g = 0
    for _, c in p:
        g = gcd(g, c)
        if g == 1:
            break
    if p[0][1] < 0:
        g = -g
    if g == 1:
        return tuple(p)
    return tuple((m, c // g) for m, c in p)


def add_scaled(p, cp, sp, q, cq, sq):
    """``cp*x^sp*p + cq*x^sq*q`` as a descending term list."""
    out = []
    i = j = 0
    lp, lq = len(p), len(q)
    while i < lp and j < lq:
        mp = p[i][0] + sp
        mq = q[j][0] + sq
        if mp > mq:
            out.append((mp, cp * p[i][1]))
            i += 1
        elif mp < mq:
            out.append((mq, cq * q[j][1]))
            j += 1
        else:
            c = cp * p[i][1] + cq * q[j][1]
            if c:
                out.append((mp, c))
            i += 1
            j += 1
    while i < lp:
        out.append((p[i][0] + sp, cp * p[i][1]))
        i += 1
    while j < lq:
        out.append((q[j][0] + sq, cq * q[j][1]))
        j += 1
    return out


def s_polynomial(f, g, lcm):
    """Fraction-free S-polynomial of ``f`` and ``g`` given the packed lcm of their heads."""
    lmf, lcf = f[0]
    lmg, lcg = g[0]
    d = gcd(lcf, lcg)
    return primitive(
        add_scaled(f[1:], lcg // d, lcm - lmf, g[1:], -(lcf // d), lcm - lmg)
    )


def normal_form(p, lms, lcs, tails, guard):
    """Fraction-free full normal form of ``p`` against the parallel reducer lists.

    Scans terms in descending order; a reducible term is cancelled by
    cross-multiplying, so the result is a scalar multiple of the exact
    normal form.  The returned tuple is primitive.
    """
    done = []
    cur = tuple(p)
    nred = len(lms)
    pos = 0
    steps = 0
    while pos < len(cur):
        m, c = cur[pos]
        red = -1
        for k in range(nred):
            d = m - lms[k]
            if d >= 0 and not (d & guard):
                red = k
                break
        if red < 0:
            done.append((m, c))
            pos += 1
            continue
        lc = lcs[red]
        g = gcd(c, lc)
        a = lc // g
        b = -(c // g)
        if a < 0:
            a = -a
            b = -b
        cur = add_scaled(cur[pos + 1 :], a, 0, tails[red], b, m - lms[red])
        pos = 0
        if a != 1 and done:
            done = [(mm, a * cc) for mm, cc in done]
        steps += 1
        if steps % 64 == 0 and (done or cur):
            # keep coefficient growth in check
            g = 0
            for _, cc in done:
                g = gcd(g, cc)
                if g == 1:
                    break
            if g != 1:
                for _, cc in cur:
                    g = gcd(g, cc)
                    if g == 1:
                        break
            if g > 1:
                done = [(mm, cc // g) for mm, cc in done]
                cur = [(mm, cc // g) for mm, cc in cur]
    return primitive(done)


def normal_form_mod(p, lms, lcs, tails, guard, prime):
    """Normal form over GF(prime); leading coefficient normalized to 1."""
    done = []
    cur = tuple(p)
    nred = len(lms)
    pos = 0
    while pos < len(cur):
        m, c = cur[pos]
        red = -1
        for k in range(nred):
            d = m - lms[k]
            if d >= 0 and not (d & guard):
                red = k
                break
        if red < 0:
            done.append((m, c))
            pos += 1
            continue
        factor = (c * pow(lcs[red], prime - 2, prime)) % prime
        tail = tails[red]
        shift = m - lms[red]
        out = []
        i = j = 0
        rest = cur[pos + 1 :]
        lp, lq = len(rest), len(tail)
        while i < lp and j < lq:
            mp = rest[i][0]
            mq = tail[j][0] + shift
            if mp > mq:
                out.append(rest[i])
                i += 1
            elif mp < mq:
                out.append((mq, (-factor * tail[j][1]) % prime))
                j += 1
            else:
                cc = (rest[i][1] - factor * tail[j][1]) % prime
                if cc:
                    out.append((mp, cc))
                i += 1
                j += 1
        while i < lp:
            out.append(rest[i])
            i += 1
        while j < lq:
            out.append((tail[j][0] + shift, (-factor * tail[j][1]) % prime))
            j += 1
        cur = out
        pos = 0
    if done and done[0][1] != 1:
        inv = pow(done[0][1], prime - 2, prime)
        done = [(m, (c * inv) % prime) for m, c in done]
    return tuple(done)


def find_divisor(m, lms, guard):
    """Index of the first reducer head dividing ``m``, or -1."""
    for k in range(len(lms)):
        d = m - lms[k]
        if d >= 0 and not (d & guard):
            return k
    return -1
