"""Exact sparse polynomials over Q with ring-bound packed monomials."""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd, lcm

from ._kernel import primitive
from .errors import BadIndex, ParseError, UnboundVariable, ZeroPolynomial
from .ring import Monomial, PolyRing, Variable


def _norm_coeff(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class Polynomial:
    """Immutable sparse polynomial: {packed monomial: nonzero coefficient}.

    Coefficients are ints or Fractions, always exact.  Equality is
    structural on the canonical form.
    """

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring, terms):
        self.ring = ring
        clean = {}
        for mono, c in terms.items():
            if c:
                clean[mono] = _norm_coeff(c)
        self.terms = clean
        self._hash = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, ring):
        return cls(ring, {})

    @classmethod
    def constant(cls, ring, c):
        return cls(ring, {0: Fraction(c)})

    @classmethod
    def variable(cls, ring, var):
        return cls(ring, {ring.pack({ring.index_of(var): 1}): 1})

    @classmethod
    def from_monomial(cls, monomial, coeff=1):
        return cls(monomial.ring, {monomial.packed: coeff})

    # -- structure ---------------------------------------------------------

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def is_monomial(self):
        return len(self.terms) == 1 and all(c == 1 for c in self.terms.values())

    def monomials(self):
        return [Monomial(self.ring, m) for m in sorted(self.terms, reverse=True)]

    def coefficient(self, monomial):
        m = monomial.packed if isinstance(monomial, Monomial) else monomial
        return self.terms.get(m, 0)

    def total_degree(self):
        if not self.terms:
            raise ZeroPolynomial("degree of 0 undefined")
        return max(self.ring.total_degree(m) for m in self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.ring, other)
        return (
            isinstance(other, Polynomial)
            and self.ring == other.ring
            and self.terms == other.terms
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, tuple(sorted(self.terms.items()))))
        return self._hash

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise BadIndex("polynomials from different rings")
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.ring, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Polynomial(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return Polynomial.zero(self.ring)
            return Polynomial(self.ring, {m: c * other for m, c in self.terms.items()})
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = m1 + m2
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                else:
                    del out[m]
        return Polynomial(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            raise ValueError("negative power")
        out = Polynomial.constant(self.ring, 1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base if e > 1 else base
            e >>= 1
        return out

    def mul_monomial(self, mono, coeff=1):
        m = mono.packed if isinstance(mono, Monomial) else mono
        return Polynomial(self.ring, {mm + m: cc * coeff for mm, cc in self.terms.items()})

    # -- leading terms ---------------------------------------------------------

    def leading_term(self, order):
        """(Monomial, coefficient) of the order-greatest term."""
        if not self.terms:
            raise ZeroPolynomial("leading term of 0")
        key = order.key
        best = max(self.terms, key=key)
        return Monomial(self.ring, best), self.terms[best]

    def leading_monomial(self, order):
        return self.leading_term(order)[0]

    def sorted_terms(self, order):
        key = order.key
        return [(Monomial(self.ring, m), self.terms[m]) for m in sorted(self.terms, key=key, reverse=True)]

    # -- substitution ------------------------------------------------------------

    def substitute(self, mapping, target_ring):
        """Evaluate under a total substitution Variable -> Polynomial in target_ring."""
        out = Polynomial.zero(target_ring)
        for mono, c in self.terms.items():
            term = Polynomial.constant(target_ring, c)
            for var, e in self.ring.exponents(mono).items():
                img = mapping.get(var)
                if img is None:
                    raise UnboundVariable(f"substitution missing {var}")
                term = term * img**e
            out = out + term
        return out

    # -- rendering ------------------------------------------------------------

    def text(self, order=None):
        """Deterministic rendering, terms descending under the given order."""
        if not self.terms:
            return "0"
        if order is not None:
            monos = sorted(self.terms, key=order.key, reverse=True)
        else:
            monos = sorted(self.terms, reverse=True)
        parts = []
        for m in monos:
            c = self.terms[m]
            ms = self.ring.mono_str(m)
            if m == 0:
                chunk = str(abs(c))
            elif abs(c) == 1:
                chunk = ms
            else:
                chunk = f"{abs(c)}*{ms}"
            parts.append(("- " if c < 0 else "+ ") + chunk)
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    def __str__(self):
        return self.text()

    def __repr__(self):
        return f"Polynomial({self.text()})"

    # -- ring changes ------------------------------------------------------------

    def embed(self, target_ring):
        """Reinterpret in a ring containing the same named variables."""
        out = {}
        for mono, c in self.terms.items():
            out[target_ring.pack(self.ring.exponents(mono))] = c
        return Polynomial(target_ring, out)


# -- engine conversion ------------------------------------------------------


def to_engine(poly, order):
    """Primitive integer term tuple sorted descending under the order's keys."""
    if not poly.terms:
        return ()
    den = 1
    for c in poly.terms.values():
        if isinstance(c, Fraction):
            den = lcm(den, c.denominator)
    items = []
    for m, c in poly.terms.items():
        items.append((order.key(m), int(c * den)))
    items.sort(reverse=True)
    return primitive(tuple(items))


def from_engine(terms, order, ring=None):
    """Engine term tuple (order keys) back to a Polynomial."""
    ring = ring or order.ring
    return Polynomial(ring, {order.unkey(k): c for k, c in terms})


# -- parsing ------------------------------------------------------------------

_FACTOR = re.compile(
    r"""(?:
        x(?P<xd>[1-9][0-9]?)            # x then 1-2 digits: single-digit row/col pair
      | x\{(?P<xr>\d+),(?P<xc>\d+)\}
      | T(?P<td>[1-9]\d*)               # T then digits: one vertex per digit
      | T\{(?P<tb>\d+(?:,\d+)*)\}
      | (?P<tvar>t)
    )(?:\^(?P<pow>\d+))?$""",
    re.VERBOSE,
)


def parse_monomial(ring, text):
    """Parse the CLI monomial grammar into a Monomial.

    Factors are separated by whitespace or '*': ``x<r><c>`` (single digits),
    ``x{r,c}``, ``T<digits>`` (one vertex per digit), ``T{a,b,...}``, ``t``;
    an optional ``^k`` raises a factor to a power.
    """
    exps = {}
    cleaned = text.replace("*", " ").split()
    if not cleaned:
        raise ParseError("empty monomial")
    for tok in cleaned:
        mt = _FACTOR.match(tok)
        if not mt:
            raise ParseError(f"cannot parse factor {tok!r}")
        power = int(mt.group("pow") or 1)
        if mt.group("xd"):
            digits = mt.group("xd")
            if len(digits) != 2:
                raise ParseError(f"{tok!r}: write x{{r,c}} for multi-digit indices")
            var = Variable.x(int(digits[0]), int(digits[1]))
        elif mt.group("xr"):
            var = Variable.x(int(mt.group("xr")), int(mt.group("xc")))
        elif mt.group("td"):
            var = Variable.T(tuple(int(d) for d in mt.group("td")))
        elif mt.group("tb"):
            var = Variable.T(tuple(int(v) for v in mt.group("tb").split(",")))
        else:
            var = Variable.t()
        if not ring.has_variable(var):
            raise ParseError(f"{var} is not a variable of this ring")
        idx = ring.index_of(var)
        exps[idx] = exps.get(idx, 0) + power
    return Monomial(ring, ring.pack(exps))
