"""Explicit generator families for Rees and fiber presentation ideals.

Emits, for a closed complex, the three marked binomial families presenting
the Rees algebra of the initial ideal (Koszul swaps across cliques, linear
syzygies inside cliques, Plucker exchanges inside cliques), their lifts (the
Koszul determinantal swaps, the Eagon-Northcott linear forms, and the
Grassmann-Plucker quadrics), and the symmetric-algebra generators.  Every
emitted element is evaluated under its presentation map and must vanish.
"""

from __future__ import annotations

import enum
from fractions import Fraction
from itertools import combinations
from math import gcd

from .dfi import (
    base_ring,
    base_t_ring,
    fiber_ring,
    initial_monomial,
    minor,
    rees_ring,
)
from .errors import NotClosed, NotLiftable
from .poly import Polynomial
from .ring import Monomial, Variable


class Comparison(enum.Enum):
    LE = "LE"
    GE = "GE"
    EQ = "EQ"
    INCOMPARABLE = "Incomparable"


def plucker_compare(a, b):
    """Coordinatewise comparison of two equal-size index tuples."""
    if len(a) != len(b):
        raise ValueError("tuples of different sizes are incomparable by convention")
    le = all(x <= y for x, y in zip(a, b))
    ge = all(x >= y for x, y in zip(a, b))
    if le and ge:
        return Comparison.EQ
    if le:
        return Comparison.LE
    if ge:
        return Comparison.GE
    return Comparison.INCOMPARABLE


def plucker_meet(a, b):
    return tuple(min(x, y) for x, y in zip(a, b))


def plucker_join(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


class PluckerPoset:
    """All m-subsets of [n] ordered coordinatewise; meet/join are min/max."""

    def __init__(self, m, n):
        self.m = m
        self.n = n
        self.elements = tuple(combinations(range(1, n + 1), m))

    compare = staticmethod(plucker_compare)
    meet = staticmethod(plucker_meet)
    join = staticmethod(plucker_join)


# -- presentation maps ---------------------------------------------------------


class PresentationMaps:
    """Rings and substitution maps for one complex.

    phi:  R[T] -> R[t],  x -> x, T_a -> [a] t      (Rees algebra)
    psi:  K[T] -> R,     T_a -> [a]                (special fiber)
    phi*: R[T] -> R[t],  x -> x, T_a -> x_a t      (Rees of the initial ideal)
    psi*: K[T] -> R,     T_a -> x_a                (fiber of the initial ideal)
    """

    def __init__(self, delta):
        self.delta = delta
        self.decomposition = delta.clique_decomposition()
        self.R = base_ring(delta.m, delta.n)
        self.Rt = base_t_ring(delta.m, delta.n)
        self.RT = rees_ring(delta)
        self.FT = fiber_ring(delta)
        t = Polynomial.variable(self.Rt, Variable.t())
        self._phi = {}
        self._phi_star = {}
        self._psi = {}
        self._psi_star = {}
        for i in range(1, delta.m + 1):
            for j in range(1, delta.n + 1):
                v = Variable.x(i, j)
                self._phi[v] = Polynomial.variable(self.Rt, v)
                self._phi_star[v] = self._phi[v]
                self._psi[v] = Polynomial.variable(self.R, v)
                self._psi_star[v] = self._psi[v]
        for a in delta.facets:
            Ta = Variable.T(a)
            diag_R = Polynomial.from_monomial(initial_monomial(self.R, a))
            diag_Rt = Polynomial.from_monomial(initial_monomial(self.Rt, a))
            self._phi[Ta] = minor(self.Rt, a) * t
            self._phi_star[Ta] = diag_Rt * t
            self._psi[Ta] = minor(self.R, a)
            self._psi_star[Ta] = diag_R
        # packed translation tables for the monomial maps (fast path)
        self._img_star = {}
        for ring in (self.RT, self.FT):
            table = []
            for var in ring.variables:
                if var.kind == "x":
                    table.append(1 << self.Rt._shifts[self.Rt.index_of(var)])
                elif var.kind == "T":
                    inc = initial_monomial(self.Rt, var.index).packed
                    inc += 1 << self.Rt._shifts[self.Rt.t_index()]
                    table.append(inc)
                else:
                    raise AssertionError("unexpected variable kind")
            self._img_star[ring._key] = tuple(table)

    def phi(self, p):
        return p.substitute(self._phi, self.Rt)

    def phi_star(self, p):
        return p.substitute(self._phi_star, self.Rt)

    def psi(self, p):
        return p.substitute(self._psi, self.R)

    def psi_star(self, p):
        return p.substitute(self._psi_star, self.R)

    def phi_star_mono(self, ring, mono):
        """Packed image in R[t] of a packed monomial under the initial-ideal map."""
        table = self._img_star[ring._key]
        out = 0
        k = 0
        nv = ring.nvars
        shifts = ring._shifts
        while mono:
            e = mono & 0xFFFF
            if e:
                out += e * table[nv - 1 - k]
            mono >>= 16
            k += 1
        return out

    def diagonal(self, ring, facet):
        """Packed diagonal monomial x_{1a_1}...x_{ma_m} in the given ring."""
        return initial_monomial(ring, facet).packed


_maps_cache = {}


def presentation_maps(delta):
    maps = _maps_cache.get(delta)
    if maps is None:
        maps = PresentationMaps(delta)
        _maps_cache[delta] = maps
    return maps


# -- generator sets ---------------------------------------------------------------


class GeneratorItem:
    """One presentation-ideal generator with its family tag and optional marked term."""

    __slots__ = ("family", "polynomial", "marked", "data")

    def __init__(self, family, polynomial, marked=None, data=None):
        self.family = family
        self.polynomial = polynomial
        self.marked = marked  # Monomial designated as the rewriting head
        self.data = data

    def marked_coefficient(self):
        return self.polynomial.coefficient(self.marked)

    def __repr__(self):
        return f"GeneratorItem({self.family}, {self.polynomial.text()})"


class GeneratorSet:
    """A tagged family list presenting one target ideal."""

    def __init__(self, target, ring, items):
        self.target = target
        self.ring = ring
        self.items = list(items)

    def __iter__(self):
        return iter(self.items)

    def __len__(self):
        return len(self.items)

    def polynomials(self):
        return [it.polynomial for it in self.items]

    def by_family(self, family):
        return [it for it in self.items if it.family == family]

    def family_counts(self):
        counts = {}
        for it in self.items:
            counts[it.family] = counts.get(it.family, 0) + 1
        return counts

    def to_json(self, order=None):
        out = []
        for it in self.items:
            rec = {"family": it.family, "polynomial_text": it.polynomial.text(order)}
            if it.marked is not None:
                rec["marked_term"] = str(it.marked)
            out.append(rec)
        return {"target": self.target, "items": out}

    def __repr__(self):
        counts = ", ".join(f"{k}: {v}" for k, v in sorted(self.family_counts().items()))
        return f"GeneratorSet({self.target}; {counts})"


def _require_closed(delta):
    ok, witness = delta.is_closed()
    if not ok:
        f, g, pos = witness
        raise NotClosed(f"{f} and {g} share coordinate {pos} outside a clique")


def _koszul_pairs(delta, decomp):
    """Unordered facet pairs not sharing a clique, oriented earlier clique first."""
    pairs = []
    for a, b in combinations(delta.facets, 2):
        if decomp.share_clique(a, b):
            continue
        ka, kb = decomp.earliest_clique(a), decomp.earliest_clique(b)
        # distinct facets with no common clique sit in distinct earliest cliques
        pairs.append((a, b) if ka < kb else (b, a))
    pairs.sort()
    return pairs


def _check_kernel(items, evaluate, target):
    for it in items:
        if not evaluate(it.polynomial).is_zero():
            raise AssertionError(
                f"{target} generator {it.polynomial.text()} is not in the kernel"
            )


def gens_rees_initial(delta, decomposition=None):
    """Marked Groebner generators for the Rees presentation of the initial ideal.

    Koszul family: x_a T_b - x_b T_a over facets in distinct cliques, the
    earlier clique carrying the marked x-part.  Linear syzygies: over every
    (m+1)-set c inside a clique and every row.  Plucker exchanges: over
    incomparable same-clique pairs.
    """
    _require_closed(delta)
    maps = presentation_maps(delta)
    decomp = decomposition or maps.decomposition
    RT = maps.RT
    items = []
    for a, b in _koszul_pairs(delta, decomp):
        xa = maps.diagonal(RT, a)
        xb = maps.diagonal(RT, b)
        Ta = 1 << RT._shifts[RT.T_index(a)]
        Tb = 1 << RT._shifts[RT.T_index(b)]
        marked = xa + Tb
        poly = Polynomial(RT, {marked: 1, xb + Ta: -1})
        items.append(GeneratorItem("Koszul", poly, Monomial(RT, marked), ("koszul", a, b)))
    for c in delta.clique_skeleton_faces(delta.m):
        for i in range(1, delta.m + 1):
            head_facet = c[:i - 1] + c[i:]
            next_facet = c[:i] + c[i + 1 :]
            marked = (1 << RT._shifts[RT.x_index(i, c[i - 1])]) + (
                1 << RT._shifts[RT.T_index(head_facet)]
            )
            other = (1 << RT._shifts[RT.x_index(i, c[i])]) + (
                1 << RT._shifts[RT.T_index(next_facet)]
            )
            poly = Polynomial(RT, {marked: 1, other: -1})
            items.append(
                GeneratorItem("LinearSyzygy", poly, Monomial(RT, marked), ("linsyz", c, i))
            )
    for a, b in combinations(delta.facets, 2):
        if plucker_compare(a, b) is not Comparison.INCOMPARABLE:
            continue
        if not decomp.share_clique(a, b):
            continue
        meet, join = plucker_meet(a, b), plucker_join(a, b)
        marked = (1 << RT._shifts[RT.T_index(a)]) + (1 << RT._shifts[RT.T_index(b)])
        other = (1 << RT._shifts[RT.T_index(meet)]) + (1 << RT._shifts[RT.T_index(join)])
        poly = Polynomial(RT, {marked: 1, other: -1})
        items.append(GeneratorItem("Plucker", poly, Monomial(RT, marked), ("plucker", a, b)))
    _check_kernel(items, maps.phi_star, "rees-initial")
    return GeneratorSet("ReesInitial", RT, items)


def gens_fiber_initial(delta, decomposition=None):
    """Plucker exchange binomials only, in the T-ring."""
    _require_closed(delta)
    maps = presentation_maps(delta)
    decomp = decomposition or maps.decomposition
    FT = maps.FT
    items = []
    for a, b in combinations(delta.facets, 2):
        if plucker_compare(a, b) is not Comparison.INCOMPARABLE:
            continue
        if not decomp.share_clique(a, b):
            continue
        meet, join = plucker_meet(a, b), plucker_join(a, b)
        marked = (1 << FT._shifts[FT.T_index(a)]) + (1 << FT._shifts[FT.T_index(b)])
        other = (1 << FT._shifts[FT.T_index(meet)]) + (1 << FT._shifts[FT.T_index(join)])
        poly = Polynomial(FT, {marked: 1, other: -1})
        items.append(GeneratorItem("Plucker", poly, Monomial(FT, marked), ("plucker", a, b)))
    _check_kernel(items, maps.psi_star, "fiber-initial")
    return GeneratorSet("FiberInitial", FT, items)


def _eagon_northcott(maps, c, i):
    """The alternating linear form over the (m+1)-set c and row i.

    Sign normalized so the coefficient of the within-clique head
    x_{i c_i} T_{c minus c_i} is +1.
    """
    RT = maps.RT
    terms = {}
    for j in range(1, len(c) + 1):
        facet = c[: j - 1] + c[j:]
        mono = (1 << RT._shifts[RT.x_index(i, c[j - 1])]) + (
            1 << RT._shifts[RT.T_index(facet)]
        )
        terms[mono] = (-1) ** j
    poly = Polynomial(RT, terms)
    if (-1) ** i < 0:
        poly = -poly
    return poly


def _straighten_quadric(ring, k, cs, ds, avs):
    """Shuffle-sum Grassmann-Plucker quadric; None when it collapses to zero.

    Splits a_1..a_{m+1} into an increasing group of m-k joining the c-block
    and the complementary k+1 joining the d-block, sorts each resulting
    T-index with its permutation sign, and drops summands with repeated
    indices.  The result is content- and sign-normalized.
    """
    mp1 = len(avs)
    terms = {}
    for first in combinations(range(mp1), mp1 - 1 - k):
        # first group joins the c-block, the rest joins the d-block
        rest = tuple(r for r in range(mp1) if r not in first)
        sign = _shuffle_sign(first + rest)
        idx1 = cs + tuple(avs[r] for r in first)
        idx2 = tuple(avs[r] for r in rest) + ds
        s1 = _sort_with_sign(idx1)
        s2 = _sort_with_sign(idx2)
        if s1 is None or s2 is None:
            continue
        (f1, sg1), (f2, sg2) = s1, s2
        mono = (1 << ring._shifts[ring.T_index(f1)]) + (1 << ring._shifts[ring.T_index(f2)])
        c = terms.get(mono, 0) + sign * sg1 * sg2
        if c:
            terms[mono] = c
        else:
            del terms[mono]
    if not terms:
        return None
    content = 0
    for c in terms.values():
        content = gcd(content, c)
        if content == 1:
            break
    if terms[max(terms)] < 0:
        content = -content
    if content != 1:
        terms = {mo: c // content for mo, c in terms.items()}
    return Polynomial(ring, terms)


def _shuffle_sign(perm):
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def _sort_with_sign(idx):
    """Sorted tuple and the sign of the sorting permutation; None on repeats."""
    if len(set(idx)) != len(idx):
        return None
    sign = 1
    lst = list(idx)
    for i in range(len(lst)):
        for j in range(i + 1, len(lst)):
            if lst[i] > lst[j]:
                lst[i], lst[j] = lst[j], lst[i]
                sign = -sign
    return tuple(lst), sign


def _plucker_quadrics(delta, ring):
    """Deduplicated straightened quadrics from every clique, in the given ring."""
    m = delta.m
    decomp = delta.clique_decomposition()
    seen = {}
    for vs in decomp.cliques:
        for k in range(1, m):
            d_len = m - k - 1
            for cs in combinations(vs, k):
                for ds in combinations(vs, d_len):
                    for avs in combinations(vs, m + 1):
                        poly = _straighten_quadric(ring, k, cs, ds, avs)
                        if poly is None or len(poly.terms) < 2:
                            continue
                        key = tuple(sorted(poly.terms.items()))
                        if key not in seen:
                            seen[key] = (poly, (k, cs, ds, avs))
    order = ring.order("deglex")
    items = [
        GeneratorItem("Plucker", poly, None, ("quadric",) + data)
        for _, (poly, data) in sorted(seen.items(), key=lambda kv: order.key(max(kv[1][0].terms, key=order.key)))
    ]
    return items


def gens_rees_lifted(delta, decomposition=None):
    """Lifted Groebner generators for the Rees presentation ideal.

    Koszul determinantal swaps [a..] T_b - [b..] T_a across cliques, the full
    Eagon-Northcott alternating forms, and the Grassmann-Plucker quadrics.
    """
    _require_closed(delta)
    maps = presentation_maps(delta)
    decomp = decomposition or maps.decomposition
    RT = maps.RT
    items = []
    for a, b in _koszul_pairs(delta, decomp):
        Ta = Polynomial.variable(RT, Variable.T(a))
        Tb = Polynomial.variable(RT, Variable.T(b))
        poly = minor(RT, a) * Tb - minor(RT, b) * Ta
        items.append(GeneratorItem("Koszul", poly, None, ("koszul", a, b)))
    for c in delta.clique_skeleton_faces(delta.m):
        for i in range(1, delta.m + 1):
            items.append(
                GeneratorItem(
                    "LinearSyzygy", _eagon_northcott(maps, c, i), None, ("linsyz", c, i)
                )
            )
    items.extend(
        GeneratorItem(it.family, it.polynomial.embed(RT), None, it.data)
        for it in _plucker_quadrics(delta, maps.FT)
    )
    _check_kernel(items, maps.phi, "rees-lifted")
    return GeneratorSet("ReesLifted", RT, items)


def gens_fiber_lifted(delta, decomposition=None):
    """The Grassmann-Plucker quadrics only, in the T-ring."""
    _require_closed(delta)
    maps = presentation_maps(delta)
    items = _plucker_quadrics(delta, maps.FT)
    _check_kernel(items, maps.psi, "fiber-lifted")
    return GeneratorSet("FiberLifted", maps.FT, items)


def gens_symmetric(delta):
    """Generators of the symmetric-algebra presentation ideal.

    Computed as the T-linear elements of the Rees kernel's reduced Groebner
    basis (the symmetric ideal is generated in T-degree one, where it agrees
    with the Rees kernel).
    """
    from .oracle import kernel_of_map

    maps = presentation_maps(delta)
    L = kernel_of_map(delta, "rho")
    items = [GeneratorItem("Symmetric", g, None, None) for g in L.generators]
    _check_kernel(items, maps.phi, "symmetric")
    return GeneratorSet("SymmetricLifted", maps.RT, items)


# -- lifting --------------------------------------------------------------------


def phi_image_lead_key(maps, ring, mono):
    """Key, under the t-graded lex order, of the image's lead monomial.

    For a monomial u * T_{a_1} ... T_{a_d}, the image under the Rees map has
    lead u * x_{a_1} ... x_{a_d} * t^d; comparison under lex_x_prime.
    """
    img = maps.phi_star_mono(ring, mono)
    return maps.Rt.order("lex_x_prime").key(img)


def sagbi_lift(item, delta, decomposition=None, quadrics=None):
    """Lift an initial-family binomial to a Rees-kernel element.

    Koszul binomials lift to determinantal swaps, linear syzygies to the
    Eagon-Northcott forms, Plucker exchanges to the straightened quadric
    whose head matches.  The initial binomial's two monomials have equal
    image leads by construction; every extra term of the lift is
    machine-checked to have a strictly smaller image lead.  Failure raises
    NotLiftable.
    """
    maps = presentation_maps(delta)
    RT = maps.RT
    if item.data is None:
        raise NotLiftable("item carries no family payload")
    kind = item.data[0]
    binomial = item.polynomial.embed(RT) if item.polynomial.ring != RT else item.polynomial
    if kind == "koszul":
        _, a, b = item.data
        Ta = Polynomial.variable(RT, Variable.T(a))
        Tb = Polynomial.variable(RT, Variable.T(b))
        lift = minor(RT, a) * Tb - minor(RT, b) * Ta
        head = maps.diagonal(RT, a) + (1 << RT._shifts[RT.T_index(b)])
    elif kind == "linsyz":
        _, c, i = item.data
        lift = _eagon_northcott(maps, c, i)
        head_facet = c[: i - 1] + c[i:]
        head = (1 << RT._shifts[RT.x_index(i, c[i - 1])]) + (
            1 << RT._shifts[RT.T_index(head_facet)]
        )
    elif kind == "plucker":
        _, a, b = item.data
        head = (1 << RT._shifts[RT.T_index(a)]) + (1 << RT._shifts[RT.T_index(b)])
        if quadrics is None:
            quadrics = _plucker_quadrics(delta, maps.FT)
        lift = None
        for q in quadrics:
            qq = q.polynomial.embed(RT)
            c = qq.coefficient(head)
            if not c:
                continue
            cand = qq if c == 1 else qq * Fraction(1, c)
            if _tail_dominated(maps, RT, cand, head, binomial):
                lift = cand
                break
        if lift is None:
            raise NotLiftable(f"no dominated quadric lift for T-pair {a}, {b}")
    else:
        raise NotLiftable(f"unknown family payload {item.data!r}")
    if not maps.phi(lift).is_zero():
        raise NotLiftable("candidate lift does not vanish under the Rees map")
    if not _tail_dominated(maps, RT, lift, head, binomial):
        raise NotLiftable("lift tail is not dominated by the marked head")
    return lift


def _tail_dominated(maps, ring, poly, head, binomial):
    """Every lift term beyond the initial binomial has a smaller image lead."""
    head_key = phi_image_lead_key(maps, ring, head)
    if head not in poly.terms:
        return False
    for mono in poly.terms:
        if mono == head or mono in binomial.terms:
            continue
        if phi_image_lead_key(maps, ring, mono) >= head_key:
            return False
    return True
