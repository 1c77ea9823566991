"""Sorted and clique-sorted monomials, the marked-binomial rewriter, and
unique factorization of monomials in the initial Rees algebra.

Monomials here live in the Rees source ring K[x][T]; their images live in
K[x][t].  A monomial is clique-sorted when no marked head of the emitted
binomial families divides it; the rewriter drives arbitrary monomials to
that normal form with a machine-checked well-founded measure.
"""

from __future__ import annotations

import random
from bisect import bisect_left, bisect_right
from typing import NamedTuple

from .errors import DuplicateVertex, NonTermination, NotClosed, NotInImage
from .presentations import (
    Comparison,
    gens_rees_initial,
    plucker_compare,
    presentation_maps,
)
from .ring import Monomial

FIELD_MASK = 0xFFFF


class SortingDistance(NamedTuple):
    r: int
    inversions: tuple

    def is_sorted(self):
        return self.r == 0 and not any(self.inversions)


def insert_index(facet, j):
    """Insert a vertex into a sorted facet; returns (tuple, 1-based position)."""
    facet = tuple(facet)
    if j in facet:
        raise DuplicateVertex(f"{j} already in {facet}")
    pos = bisect_left(facet, j)
    return facet[:pos] + (j,) + facet[pos:], pos + 1


def _split(ring, mono):
    """((i, j, exp) x-list, (facet, exp) T-list) of a packed monomial."""
    xs = []
    Ts = []
    shifts = ring._shifts
    for k in ring.x_indices():
        e = (mono >> shifts[k]) & FIELD_MASK
        if e:
            i, j = ring.variables[k].index
            xs.append((i, j, e))
    for k in ring.T_indices():
        e = (mono >> shifts[k]) & FIELD_MASK
        if e:
            Ts.append((ring.variables[k].index, e))
    return xs, Ts


def _t_sequence(Ts):
    """T-factors expanded with multiplicity, in lex order."""
    seq = []
    for facet, e in Ts:
        seq.extend([facet] * e)
    seq.sort()
    return seq


def inversion_sequence(facets):
    """Per-row inversion counts of a lex-ordered facet sequence."""
    if not facets:
        return ()
    m = len(facets[0])
    out = []
    for p in range(m):
        row = [f[p] for f in facets]
        out.append(
            sum(1 for i in range(len(row)) for j in range(i + 1, len(row)) if row[i] > row[j])
        )
    return tuple(out)


def sorting_distance(mono):
    """Distance from sortedness: (r; per-row inversion counts).

    r counts distinct pairs (x_ij, T_a) dividing the monomial with j not in
    a and j landing at position i when inserted; the inversion counts come
    from the lex-ordered T-factor sequence.
    """
    ring = mono.ring
    xs, Ts = _split(ring, mono.packed)
    r = 0
    for i, j, _ in xs:
        for facet, _ in Ts:
            if j in facet:
                continue
            _, pos = insert_index(facet, j)
            if pos == i:
                r += 1
    seq = _t_sequence(Ts)
    inv = inversion_sequence(seq) if seq else (0,) * ring.m
    return SortingDistance(r, inv)


def is_sorted(mono):
    return sorting_distance(mono).is_sorted()


# -- clique-sorted predicate -----------------------------------------------------


class CliqueContext:
    """Precomputed clique data for fast predicate and measure evaluation."""

    def __init__(self, delta, decomposition=None):
        ok, witness = delta.is_closed()
        if not ok:
            raise NotClosed(f"clique-sorted machinery needs a closed complex: {witness}")
        self.delta = delta
        self.decomp = decomposition or delta.clique_decomposition()
        self.maps = presentation_maps(delta)
        self.ring = self.maps.RT
        self.earliest = {a: self.decomp.earliest_clique(a) for a in delta.facets}
        self.cliques = [set(vs) for vs in self.decomp.cliques]
        # vertex values attainable in each row of a facet of each clique
        self.row_values = []
        m = delta.m
        for vs in self.decomp.cliques:
            vals = []
            for i in range(1, m + 1):
                lo, hi = i - 1, len(vs) - (m - i)
                vals.append(set(vs[lo:hi]))
            self.row_values.append(vals)
        # diagonal monomials for the condition-(iv) scan
        self.diagonals = [
            (a, self.maps.diagonal(self.ring, a), self.earliest[a]) for a in delta.facets
        ]
        self._share = {}

    def share_clique(self, a, b):
        key = (a, b)
        hit = self._share.get(key)
        if hit is None:
            hit = self.decomp.share_clique(a, b)
            self._share[key] = hit
            self._share[(b, a)] = hit
        return hit

    def face_of_clique_complex(self, vertices):
        vs = set(vertices)
        return any(vs <= c for c in self.cliques)

    def groups(self, Ts):
        """T-factors grouped by earliest clique: {clique index: lex-sorted facets}."""
        out = {}
        for facet, e in Ts:
            out.setdefault(self.earliest[facet], []).extend([facet] * e)
        for seq in out.values():
            seq.sort()
        return out


def is_clique_sorted(mono, ctx):
    """(verdict, tag): tag names the first violated condition, or None.

    A monomial is clique-sorted exactly when no marked family head divides
    it: (i) T-factors sharing a maximal clique are pairwise comparable in
    the Plucker order, (ii) every factor is counted in its earliest clique
    (holds by construction of the grouping), (iii) no x-variable inserts
    into a cohabiting T-facet at its own row, (iv) no diagonal x_a with a in
    a strictly earlier clique than a non-cohabiting T-facet b.
    """
    ring = ctx.ring
    packed = mono.packed if isinstance(mono, Monomial) else mono
    xs, Ts = _split(ring, packed)
    facets = [f for f, _ in Ts]
    for u in range(len(facets)):
        for v in range(u + 1, len(facets)):
            f, g = facets[u], facets[v]
            if ctx.share_clique(f, g) and plucker_compare(f, g) is Comparison.INCOMPARABLE:
                return False, "i"
    for i, j, _ in xs:
        for facet, _ in Ts:
            if j in facet:
                continue
            tup, pos = insert_index(facet, j)
            if pos == i and ctx.face_of_clique_complex(tup):
                return False, "iii"
    x_part = _x_part(ring, packed)
    guard = ring.guard
    for a, diag, ka in ctx.diagonals:
        d = x_part - diag
        if d < 0 or (d & guard):
            continue
        for b, _ in Ts:
            if not ctx.share_clique(a, b) and ka < ctx.earliest[b]:
                return False, "iv"
    return True, None


def _x_part(ring, mono):
    out = 0
    shifts = ring._shifts
    for k in ring.x_indices():
        e = (mono >> shifts[k]) & FIELD_MASK
        if e:
            out += e << shifts[k]
    return out


def condition_iv_weight(ctx, packed):
    """Multiplicity-weighted count of cross-clique (diagonal, T-facet) violations."""
    ring = ctx.ring
    _, Ts = _split(ring, packed)
    x_part = _x_part(ring, packed)
    guard = ring.guard
    iv = 0
    for a, diag, ka in ctx.diagonals:
        d = x_part - diag
        if d < 0 or (d & guard):
            continue
        # exact power of the diagonal monomial dividing the x-part
        power = min(
            (x_part >> ring._shifts[ring.x_index(i + 1, v)]) & FIELD_MASK
            for i, v in enumerate(a)
        )
        for b, eb in Ts:
            if not ctx.share_clique(a, b) and ka < ctx.earliest[b]:
                iv += power * eb
    return iv


def incomparable_pair_weight(ctx, packed):
    """Multiplicity-weighted count of cohabiting incomparable T-factor pairs."""
    _, Ts = _split(ctx.ring, packed)
    w = 0
    for u in range(len(Ts)):
        for v in range(u + 1, len(Ts)):
            (f, ef), (g, eg) = Ts[u], Ts[v]
            if ctx.share_clique(f, g) and plucker_compare(f, g) is Comparison.INCOMPARABLE:
                w += ef * eg
    return w


def insertion_pair_weight(ctx, packed):
    """Multiplicity-weighted count of clique-face insertion pairs (x_ij, T_a)."""
    ring = ctx.ring
    xs, Ts = _split(ring, packed)
    r = 0
    for i, j, ex in xs:
        for facet, eb in Ts:
            if j in facet:
                continue
            tup, pos = insert_index(facet, j)
            if pos == i and ctx.face_of_clique_complex(tup):
                r += ex * eb
    return r


# -- the rewriting engine ----------------------------------------------------------


class MarkedPolynomial:
    """A polynomial with one designated term acting as the rewriting head."""

    __slots__ = ("polynomial", "marked")

    def __init__(self, polynomial, marked):
        packed = marked.packed if isinstance(marked, Monomial) else marked
        if packed not in polynomial.terms:
            raise ValueError("marked term must occur in the polynomial")
        self.polynomial = polynomial
        self.marked = packed

    def __repr__(self):
        return f"MarkedPolynomial({self.polynomial.text()}; head {self.polynomial.ring.mono_str(self.marked)})"


class Rule(NamedTuple):
    family: str
    marked: int
    replacement: int
    data: tuple


class Step(NamedTuple):
    family: str
    consumed: int
    produced: int
    data: tuple
    measure_before: tuple
    measure_after: tuple


class RewriteSystem:
    """Monomial rewriting by the marked binomial families of a closed complex.

    Termination is certified, not assumed: the constructor finds an explicit
    nonnegative integer weight vector under which every rule strictly drops
    (such weights exist for any coherently marked finite family) and
    verifies it exactly against every rule.
    """

    def __init__(self, ctx, rules=None):
        self.ctx = ctx
        self.ring = ctx.ring
        if rules is None:
            rules = rules_from_generators(gens_rees_initial(ctx.delta, ctx.decomp))
        self.rules = list(rules)
        self.guard = self.ring.guard
        self._by_family = {"Plucker": [], "LinearSyzygy": [], "Koszul": []}
        for rule in self.rules:
            self._by_family.setdefault(rule.family, []).append(rule)
        self.weights = _termination_weights(self.ring, self.rules)

    def weight(self, packed):
        w = self.weights
        shifts = self.ring._shifts
        total = 0
        for k in range(self.ring.nvars):
            e = (packed >> shifts[k]) & FIELD_MASK
            if e:
                total += e * w[k]
        return total

    def measure(self, packed):
        """(rule weight, cross-clique violation weight, incomparable pair weight).

        The first entry strictly drops at every step by the verified weight
        certificate; the other two report how far the monomial is from
        clique-sortedness.
        """
        return (
            self.weight(packed),
            condition_iv_weight(self.ctx, packed),
            incomparable_pair_weight(self.ctx, packed),
        )

    def applicable(self, packed):
        out = []
        for rule in self.rules:
            d = packed - rule.marked
            if d >= 0 and not (d & self.guard):
                out.append(rule)
        return out

    def _pick_proof_rule(self, packed):
        """Deterministic choice mirroring the termination proofs.

        Plucker exchanges first; then linear syzygies, smallest facet in the
        Plucker order then least x-variable under lex; then Koszul swaps,
        earliest x-side clique, lex-least x-facet, earliest partner group,
        poset-largest partner.
        """
        guard = self.guard
        best = None
        for rule in self._by_family["Plucker"]:
            d = packed - rule.marked
            if d >= 0 and not (d & guard):
                key = sorted(rule.data[1:])
                if best is None or key < best[0]:
                    best = (key, rule)
        if best:
            return best[1]
        candidates = []
        for rule in self._by_family["LinearSyzygy"]:
            d = packed - rule.marked
            if d >= 0 and not (d & guard):
                _, c, i = rule.data
                facet = c[: i - 1] + c[i:]
                var = (i, c[i - 1])
                candidates.append((facet, var, rule))
        if candidates:
            minimal = []
            for facet, var, rule in candidates:
                if any(
                    plucker_compare(other, facet) in (Comparison.LE,)
                    and other != facet
                    for other, _, _ in candidates
                ):
                    continue
                minimal.append((facet, var, rule))
            minimal.sort(key=lambda rec: (rec[0], (-rec[1][0], -rec[1][1])))
            facet0 = minimal[0][0]
            same = [rec for rec in minimal if rec[0] == facet0]
            # least variable under the lex order = largest (row, col)
            same.sort(key=lambda rec: (-rec[1][0], -rec[1][1]))
            return same[0][2]
        koszul = []
        for rule in self._by_family["Koszul"]:
            d = packed - rule.marked
            if d >= 0 and not (d & guard):
                _, a, b = rule.data
                koszul.append(
                    ((self.ctx.earliest[a], a, self.ctx.earliest[b], tuple(-v for v in b)), rule)
                )
        if koszul:
            koszul.sort(key=lambda rec: rec[0])
            return koszul[0][1]
        return None

    def normal_form(self, mono, strategy="proof", rng=None, budget=None, log=False):
        """(normal form, steps).  Raises NonTermination past the step budget."""
        ring = self.ring
        packed = mono.packed if isinstance(mono, Monomial) else mono
        if budget is None:
            budget = max(16, 10 * ring.total_degree(packed) ** 2)
        if strategy == "random" and rng is None:
            rng = random.Random(0)
        steps = []
        count = 0
        while True:
            if strategy == "proof":
                rule = self._pick_proof_rule(packed)
            else:
                apps = self.applicable(packed)
                rule = rng.choice(apps) if apps else None
            if rule is None:
                break
            count += 1
            if count > budget:
                raise NonTermination(f"rewriting exceeded {budget} steps")
            after = packed - rule.marked + rule.replacement
            if log:
                steps.append(
                    Step(
                        rule.family,
                        packed,
                        after,
                        rule.data,
                        self.measure(packed),
                        self.measure(after),
                    )
                )
            packed = after
        return Monomial(ring, packed), steps


def rules_from_generators(genset):
    """Monomial rewrite rules from a marked binomial family set."""
    rules = []
    for item in genset:
        poly = item.polynomial
        if item.marked is None or len(poly.terms) != 2:
            raise ValueError("rewriting needs marked binomials")
        marked = item.marked.packed
        (other,) = [m for m in poly.terms if m != marked]
        if poly.terms[marked] + poly.terms[other] != 0:
            raise ValueError("rewrite rules must be differences of monomials")
        rules.append(Rule(item.family, marked, other, item.data))
    return rules


def rules_from_marked(marked_polys):
    """Rules from explicit MarkedPolynomial binomials (head minus one tail term)."""
    rules = []
    for mp in marked_polys:
        poly = mp.polynomial
        if len(poly.terms) != 2:
            raise ValueError("rewriting needs binomials")
        (other,) = [m for m in poly.terms if m != mp.marked]
        if poly.terms[mp.marked] + poly.terms[other] != 0:
            raise ValueError("rewrite rules must be differences of monomials")
        rules.append(Rule("custom", mp.marked, other, ()))
    return rules


def reduction_measure_decreases(step):
    """Whether a logged step strictly decreased the lexicographic measure."""
    return step.measure_after < step.measure_before


def _termination_weights(ring, rules):
    """Nonnegative integer weights making every rule strictly decreasing.

    Tries a closed-form family first (row-position weights on x-variables
    against concave facet-sum weights on T-variables), then a linear-program
    fallback; either way the certificate is verified exactly on every rule.
    Raises NonTermination when no certificate is found.
    """
    m, n = ring.m, ring.n
    D = 2 * m * n + 1
    smax = m * n
    w = [0] * ring.nvars
    for k in ring.x_indices():
        _, j = ring.variables[k].index
        w[k] = D * (n - j + 1)
    for k in ring.T_indices():
        s = sum(ring.variables[k].index)
        w[k] = D * n + (smax * smax - s * s)
    if _weights_ok(ring, w, rules):
        return tuple(w)
    w2 = _lp_weights(ring, rules)
    if w2 is not None and _weights_ok(ring, w2, rules):
        return tuple(w2)
    raise NonTermination("no strictly decreasing weight certificate for the rule set")


def _weight_of(ring, w, packed):
    shifts = ring._shifts
    total = 0
    for k in range(ring.nvars):
        e = (packed >> shifts[k]) & FIELD_MASK
        if e:
            total += e * w[k]
    return total


def _weights_ok(ring, w, rules):
    return all(
        _weight_of(ring, w, rule.marked) > _weight_of(ring, w, rule.replacement)
        for rule in rules
    )


def _lp_weights(ring, rules):
    try:
        import numpy as np
        from scipy.optimize import linprog
    except ImportError:
        return None
    nv = ring.nvars
    rows = []
    for rule in rules:
        em = ring.unpack(rule.marked)
        er = ring.unpack(rule.replacement)
        rows.append([er[k] - em[k] for k in range(nv)])  # A_ub w <= -1
    res = linprog(
        c=np.ones(nv),
        A_ub=np.array(rows, dtype=float),
        b_ub=-np.ones(len(rows)),
        bounds=[(0, None)] * nv,
        method="highs",
    )
    if not res.success:
        return None
    for scale in (1000, 10**6):
        cand = [max(0, round(float(v) * scale)) for v in res.x]
        if _weights_ok(ring, cand, rules):
            return cand
    return None


def normal_form(mono, ctx_or_system, **kw):
    """Normal form of a monomial under the emitted families of a closed complex."""
    system = (
        ctx_or_system
        if isinstance(ctx_or_system, RewriteSystem)
        else RewriteSystem(ctx_or_system)
    )
    return system.normal_form(mono, **kw)


# -- unique factorization (tableau algorithm) ---------------------------------------


def _tableau_fill(rows, d):
    """Greedy semistandard fill: d facets from per-row sorted value lists.

    Consumes values in place; None when the fill is impossible.  Row one
    takes the d smallest values; later rows take the least value exceeding
    the entry above and not below the entry to the left.
    """
    m = len(rows)
    if d == 0:
        return []
    if len(rows[0]) < d:
        return None
    cols = [[rows[0][s]] for s in range(d)]
    del rows[0][:d]
    for p in range(1, m):
        avail = rows[p]
        for s in range(d):
            start = bisect_right(avail, cols[s][p - 1])
            if s > 0:
                start = max(start, bisect_left(avail, cols[s - 1][p]))
            if start >= len(avail):
                return None
            cols[s].append(avail.pop(start))
    return [tuple(c) for c in cols]


def _x_rows(ring, packed, keep=None):
    """Per-row sorted column-value lists (with multiplicity) of the x-part."""
    rows = [[] for _ in range(ring.m)]
    shifts = ring._shifts
    for k in ring.x_indices():
        e = (packed >> shifts[k]) & FIELD_MASK
        if e:
            i, j = ring.variables[k].index
            if keep is None or keep(i, j):
                rows[i - 1].extend([j] * e)
    for row in rows:
        row.sort()
    return rows


def sorted_factorization(delta, mono):
    """Unique sorted presentation u * x_{a^1} ... x_{a^d} t^d of an image monomial.

    Single-clique complexes only; returns (u: Monomial in K[x][t], facets).
    Raises NotInImage when the monomial is not in the initial Rees algebra.
    """
    maps = presentation_maps(delta)
    if len(maps.decomposition.cliques) != 1:
        raise NotInImage("sorted factorization applies to single-clique complexes")
    Rt = maps.Rt
    packed = mono.packed if isinstance(mono, Monomial) else mono
    d = Rt.t_degree(packed)
    rows = _x_rows(Rt, packed)
    facets = _tableau_fill(rows, d)
    if facets is None:
        raise NotInImage("greedy tableau fill failed")
    used = 0
    for a in facets:
        if not delta.is_facet(a):
            raise NotInImage(f"tableau produced a non-facet {a}")
        used += maps.diagonal(Rt, a)
    used += d << Rt._shifts[Rt.t_index()]
    u = packed - used
    if u < 0 or (u & Rt.guard):
        raise NotInImage("tableau consumed variables not present")
    return Monomial(Rt, u), facets


def clique_sorted_factorization(delta, mono, decomposition=None):
    """Unique clique-sorted preimage of a monomial of the initial Rees algebra.

    Returns (u: Monomial in K[x][t], {clique index: facet list}).  Bins each
    x-variable to the earliest clique attaining it as a facet coordinate,
    fills a tableau per clique, and carries unused matching variables
    forward; the per-clique facet counts are completed by backtracking
    (their existence and uniqueness is what the factorization theorems
    assert, and the result is verified by mapping back).
    """
    ctx = CliqueContext(delta, decomposition)
    maps = ctx.maps
    Rt = maps.Rt
    packed = mono.packed if isinstance(mono, Monomial) else mono
    d = Rt.t_degree(packed)
    r = len(ctx.decomp.cliques)

    bins = [[] for _ in range(r)]  # (i, j) value lists per clique
    loose = []
    shifts = Rt._shifts
    for k in Rt.x_indices():
        e = (packed >> shifts[k]) & FIELD_MASK
        if not e:
            continue
        i, j = Rt.variables[k].index
        for kk in range(r):
            if j in ctx.row_values[kk][i - 1]:
                bins[kk].extend([(i, j)] * e)
                break
        else:
            loose.extend([(i, j)] * e)

    best = None

    def attempt(k, remaining, leftover, acc):
        # leftover: every unused binned variable so far; the ones matching
        # the current clique by row position rejoin its pool
        nonlocal best
        if best is not None:
            return
        if k == r:
            if remaining == 0:
                best = list(acc)
            return
        matching = [(i, j) for i, j in leftover if j in ctx.row_values[k][i - 1]]
        resting = [(i, j) for i, j in leftover if j not in ctx.row_values[k][i - 1]]
        pool = matching + bins[k]
        rows = [[] for _ in range(delta.m)]
        for i, j in pool:
            rows[i - 1].append(j)
        for row in rows:
            row.sort()
        max_d = min(remaining, len(rows[0]))
        for dk in range(max_d, -1, -1):
            work = [list(row) for row in rows]
            facets = _tableau_fill(work, dk)
            if facets is None:
                continue
            unused = []
            for i in range(delta.m):
                unused.extend((i + 1, j) for j in work[i])
            attempt(k + 1, remaining - dk, resting + unused, acc + [facets])
            if best is not None:
                return

    attempt(0, d, [], [])
    if best is None:
        raise NotInImage("no clique-wise tableau fill exhausts the t-degree")

    per_clique = {k + 1: facets for k, facets in enumerate(best) if facets}
    used = d << shifts[Rt.t_index()]
    preimage = 0
    RT = ctx.ring
    for k, facets in per_clique.items():
        for a in facets:
            if not delta.is_facet(a):
                raise NotInImage(f"tableau produced a non-facet {a}")
            used += maps.diagonal(Rt, a)
            preimage += 1 << RT._shifts[RT.T_index(a)]
    u = packed - used
    if u < 0 or (u & Rt.guard):
        raise NotInImage("tableau consumed variables not present")
    # verification: the preimage is clique-sorted and maps back to the input
    u_x = _x_part_to(RT, Rt, u)
    w = u_x + preimage
    ok, tag = is_clique_sorted(Monomial(RT, w), ctx)
    if not ok:
        raise NotInImage(f"factorization is not clique-sorted (condition {tag})")
    if maps.phi_star_mono(RT, w) != packed:
        raise NotInImage("factorization does not map back to the input")
    return Monomial(Rt, u), per_clique


def _x_part_to(target, source, packed):
    """Move the x-part of a packed monomial between rings sharing the x-block."""
    out = 0
    for k in source.x_indices():
        e = (packed >> source._shifts[k]) & FIELD_MASK
        if e:
            var = source.variables[k]
            out += e << target._shifts[target.index_of(var)]
    return out


def clique_sorted_preimage(delta, mono, decomposition=None):
    """The clique-sorted monomial in K[x][T] mapping to the given image monomial."""
    ctx = CliqueContext(delta, decomposition)
    Rt = ctx.maps.Rt
    RT = ctx.ring
    u, per_clique = clique_sorted_factorization(delta, mono, decomposition)
    w = _x_part_to(RT, Rt, u.packed)
    for facets in per_clique.values():
        for a in facets:
            w += 1 << RT._shifts[RT.T_index(a)]
    return Monomial(RT, w)
