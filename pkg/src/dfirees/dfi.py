"""Generic matrices, maximal minors, and determinantal facet ideals."""

from __future__ import annotations

import threading
from itertools import combinations, permutations

from . import _kernel
from .errors import BadIndex, NotClosed
from .poly import Polynomial, to_engine
from .ring import Monomial, PolyRing, Variable


def base_ring(m, n):
    """K[x_ij]."""
    return PolyRing(m, n)


def base_t_ring(m, n):
    """K[x_ij][t]."""
    return PolyRing(m, n, with_t=True)


def rees_ring(delta):
    """K[x_ij][T_a : a facet] — the presentation source for Rees targets."""
    return PolyRing(delta.m, delta.n, delta.facets)


def rees_ambient_ring(delta):
    """K[x_ij][T_a][t] — ambient for graph-ideal eliminations."""
    return PolyRing(delta.m, delta.n, delta.facets, with_t=True)


def fiber_ring(delta):
    """K[T_a : a facet] — the presentation source for fiber targets."""
    return PolyRing(delta.m, delta.n, delta.facets, with_x=False)


class GenericMatrix:
    """The m x n matrix of indeterminates over its x-ring."""

    __slots__ = ("m", "n", "ring")

    def __init__(self, m, n, ring=None):
        if m > n:
            raise BadIndex("need m <= n")
        self.m = m
        self.n = n
        self.ring = ring or base_ring(m, n)

    def entry(self, i, j):
        return Polynomial.variable(self.ring, Variable.x(i, j))


_minor_cache = {}
_minor_lock = threading.Lock()


def _perm_sign(perm):
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def minor_terms(ring, cols):
    """Leibniz terms of the maximal minor on the given columns; repeats allowed.

    Returns {packed monomial: coefficient}; the identity permutation (the
    diagonal x_{1c_1}...x_{mc_m}) carries +1.
    """
    m = ring.m
    if len(cols) != m:
        raise BadIndex(f"need {m} columns, got {cols}")
    terms = {}
    for perm in permutations(range(m)):
        mono = 0
        for i in range(m):
            mono += 1 << ring._shifts[ring.x_index(i + 1, cols[perm[i]])]
        c = terms.get(mono, 0) + _perm_sign(perm)
        if c:
            terms[mono] = c
        else:
            del terms[mono]
    return terms


def minor(ring, cols):
    """The maximal minor [c_1, ..., c_m] as a polynomial (memoized per ring)."""
    cols = tuple(cols)
    if any(not 1 <= c <= ring.n for c in cols):
        raise BadIndex(f"columns {cols} outside [1, {ring.n}]")
    if any(cols[i] >= cols[i + 1] for i in range(len(cols) - 1)):
        raise BadIndex(f"columns {cols} not strictly increasing")
    key = (ring._key, cols)
    p = _minor_cache.get(key)
    if p is None:
        p = Polynomial(ring, minor_terms(ring, cols))
        with _minor_lock:
            _minor_cache.setdefault(key, p)
    return p


def minor_text(cols):
    """Bracket notation for a minor: [1,4,5]."""
    return "[" + ",".join(str(c) for c in cols) + "]"


def initial_monomial(ring, facet):
    """Diagonal monomial x_{1a_1}...x_{ma_m}: the lex leading term of the minor."""
    facet = tuple(facet)
    mono = 0
    for i, a in enumerate(facet, start=1):
        mono += 1 << ring._shifts[ring.x_index(i, a)]
    return Monomial(ring, mono)


class DFI:
    """A determinantal facet ideal: one maximal minor per facet of the complex."""

    __slots__ = ("complex", "ring", "generators")

    def __init__(self, complex_, ring=None):
        self.complex = complex_
        self.ring = ring or base_ring(complex_.m, complex_.n)
        self.generators = {f: minor(self.ring, f) for f in complex_.facets}

    def __repr__(self):
        return f"DFI({self.complex!r})"

    def generator_list(self):
        return [self.generators[f] for f in self.complex.facets]


def build_dfi(delta):
    return DFI(delta)


def closed_gb_check(dfi, force=False):
    """Confirm every S-polynomial of the minors reduces to zero under lex.

    Requires a closed complex unless ``force`` (diagnostic mode).  Returns
    (ok, witness): witness names the first facet pair whose S-polynomial has
    a nonzero normal form.
    """
    ok, _ = dfi.complex.is_closed()
    if not ok and not force:
        raise NotClosed("closed Groebner check requires a closed complex (use force=True to probe)")
    order = dfi.ring.order("lex_x")
    facets = dfi.complex.facets
    polys = [to_engine(dfi.generators[f], order) for f in facets]
    lms = [p[0][0] for p in polys]
    lcs = [p[0][1] for p in polys]
    tails = [p[1:] for p in polys]
    guard = order.guard
    for i, j in combinations(range(len(polys)), 2):
        lcm = order.key_lcm(lms[i], lms[j])
        s = _kernel.s_polynomial(polys[i], polys[j], lcm)
        if _kernel.normal_form(s, lms, lcs, tails, guard):
            return False, (facets[i], facets[j])
    return True, None
