"""Pure simplicial complexes, closedness tests, and clique decomposition."""

from __future__ import annotations

import json
import warnings
from itertools import combinations
from typing import NamedTuple

from .errors import BadIndex, NotClosed, ParseError
from .ring import check_facet


class SimplicialComplex:
    """A pure (m-1)-dimensional complex given by its facets on [1, n]."""

    __slots__ = ("m", "n", "facets", "_facet_set", "_decomp")

    def __init__(self, m, n, facets):
        facets = tuple(sorted(check_facet(f, m, n) for f in facets))
        if not facets:
            raise BadIndex("facet set must be nonempty")
        if len(set(facets)) != len(facets):
            raise BadIndex("duplicate facets")
        if not 1 <= m <= n:
            raise BadIndex(f"need 1 <= m <= n, got m={m}, n={n}")
        self.m = m
        self.n = n
        self.facets = facets
        self._facet_set = frozenset(facets)
        self._decomp = None

    @classmethod
    def full(cls, m, n):
        """All m-subsets of [n]: the single-clique complex."""
        return cls(m, n, combinations(range(1, n + 1), m))

    @classmethod
    def from_cliques(cls, m, n, vertex_sets):
        """Union of the m-subsets of each given vertex set."""
        facets = set()
        for vs in vertex_sets:
            facets.update(combinations(sorted(vs), m))
        return cls(m, n, facets)

    @classmethod
    def from_json(cls, path):
        """Load {"m": int, "n": int, "facets": [[ints]]}; sorts and dedups with a warning."""
        try:
            with open(path) as fh:
                data = json.load(fh)
            m, n = int(data["m"]), int(data["n"])
            raw = [tuple(sorted(int(v) for v in f)) for f in data["facets"]]
        except (OSError, KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise ParseError(f"bad complex file {path}: {exc}") from None
        if len(set(raw)) != len(raw):
            warnings.warn(f"{path}: duplicate facets removed", stacklevel=2)
        try:
            return cls(m, n, set(raw))
        except BadIndex as exc:
            raise ParseError(f"bad complex file {path}: {exc}") from None

    def to_json(self):
        return {"m": self.m, "n": self.n, "facets": [list(f) for f in self.facets]}

    def is_facet(self, f):
        return tuple(f) in self._facet_set

    def __eq__(self, other):
        return (
            isinstance(other, SimplicialComplex)
            and (self.m, self.n, self.facets) == (other.m, other.n, other.facets)
        )

    def __hash__(self):
        return hash((self.m, self.n, self.facets))

    def __repr__(self):
        return f"SimplicialComplex(m={self.m}, n={self.n}, {len(self.facets)} facets)"

    # -- cliques -----------------------------------------------------------

    def _compatible(self, vertices, v):
        """Whether adding v keeps every m-subset a facet."""
        for rest in combinations(sorted(vertices), self.m - 1):
            if tuple(sorted(rest + (v,))) not in self._facet_set:
                return False
        return True

    def maximal_cliques(self):
        """All maximal vertex sets whose m-subsets are all facets."""
        maximal = set()
        frontier = {frozenset(f) for f in self.facets}
        seen = set(frontier)
        while frontier:
            nxt = set()
            for w in frontier:
                ext = [
                    v
                    for v in range(1, self.n + 1)
                    if v not in w and self._compatible(w, v)
                ]
                if not ext:
                    maximal.add(w)
                    continue
                for v in ext:
                    w2 = w | {v}
                    if w2 not in seen:
                        seen.add(w2)
                        nxt.add(w2)
            frontier = nxt
        return sorted(tuple(sorted(w)) for w in maximal)

    def clique_decomposition(self):
        """Maximal cliques ordered by minimal vertex (cached)."""
        if self._decomp is None:
            self._decomp = CliqueDecomposition.of(self)
        return self._decomp

    def clique_skeleton_faces(self, k):
        """All (k+1)-subsets of some clique's vertex set: the k-faces of the clique complex."""
        if k < self.m - 1:
            raise BadIndex(f"need k >= m-1 = {self.m - 1}")
        out = set()
        for vs in self.clique_decomposition().cliques:
            out.update(combinations(vs, k + 1))
        return sorted(out)

    # -- closedness ----------------------------------------------------------

    def skeleton_spans(self, f, g):
        """Whether every m-subset of the two facets' union is again a facet."""
        union = sorted(set(f) | set(g))
        return all(sub in self._facet_set for sub in combinations(union, self.m))

    def is_closed(self):
        """(verdict, witness): witness is (F, G, position) for a failing pair, else None.

        Tests that facets outside a common maximal clique differ in every
        sorted coordinate.
        """
        decomp = self.clique_decomposition()
        for f, g in combinations(self.facets, 2):
            shared = [i for i in range(self.m) if f[i] == g[i]]
            if shared and not decomp.share_clique(f, g):
                return False, (f, g, shared[0] + 1)
        return True, None

    def closedness_conditions_agree(self):
        """Evaluate the three equivalent closedness conditions independently.

        Returns (agree, results) with results the (a), (b), (c) verdicts:
        (a) coordinate-sharing facets span a full skeleton on their union,
        (b) pairs outside a common maximal clique differ everywhere,
        (c) pairs outside a common maximal clique have coprime diagonal
        monomials.  (a) is checked by direct facet enumeration, (b) on sorted
        coordinates against the clique decomposition, (c) by intersecting the
        diagonal variable sets.
        """
        decomp = self.clique_decomposition()
        cond_a = True
        cond_b = True
        cond_c = True
        for f, g in combinations(self.facets, 2):
            if any(f[i] == g[i] for i in range(self.m)) and not self.skeleton_spans(f, g):
                cond_a = False
            if not decomp.share_clique(f, g):
                if any(f[i] == g[i] for i in range(self.m)):
                    cond_b = False
                diag_f = {(i + 1, f[i]) for i in range(self.m)}
                diag_g = {(i + 1, g[i]) for i in range(self.m)}
                if diag_f & diag_g:
                    cond_c = False
        return cond_a == cond_b == cond_c, (cond_a, cond_b, cond_c)

    def require_closed(self):
        ok, witness = self.is_closed()
        if not ok:
            f, g, pos = witness
            raise NotClosed(f"facets {f} and {g} share coordinate {pos} outside a clique")


class CliqueDecomposition(NamedTuple):
    """Ordered maximal cliques; order is by minimal vertex, lex fallback flagged."""

    cliques: tuple
    ambiguous_order: bool
    diagnostics: tuple

    @classmethod
    def of(cls, complex_):
        cliques = complex_.maximal_cliques()
        minima = [c[0] for c in cliques]
        ambiguous = len(set(minima)) != len(minima)
        # sorted() above is already lex; min-vertex order coincides when minima distinct
        diagnostics = []
        if ambiguous:
            diagnostics.append(
                "two maximal cliques share their minimal vertex; order fell back to lex"
            )
        m = complex_.m
        for i, j in combinations(range(len(cliques)), 2):
            inter = len(set(cliques[i]) & set(cliques[j]))
            if inter > m - 1:
                diagnostics.append(
                    f"cliques {cliques[i]} and {cliques[j]} intersect in {inter} > m-1 vertices"
                )
        return cls(tuple(cliques), ambiguous, tuple(diagnostics))

    def __len__(self):
        return len(self.cliques)

    def earliest_clique(self, facet):
        """1-based index of the first clique containing the facet."""
        fs = set(facet)
        for k, vs in enumerate(self.cliques, start=1):
            if fs <= set(vs):
                return k
        raise BadIndex(f"{facet} is not contained in any clique")

    def cliques_containing(self, facet):
        fs = set(facet)
        return [k for k, vs in enumerate(self.cliques, start=1) if fs <= set(vs)]

    def share_clique(self, f, g):
        fg = set(f) | set(g)
        return any(fg <= set(vs) for vs in self.cliques)
