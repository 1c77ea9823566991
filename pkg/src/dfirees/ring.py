"""Variable universe, packed monomials, and monomial orders.

A :class:`PolyRing` holds the x-matrix variables ``x_{ij}`` (row-major), one
``T_a`` per facet ``a`` (facets sorted lexicographically), and optionally the
auxiliary variable ``t``.  A monomial is packed into a single int with one
16-bit field per variable, most significant field first, so that monomial
multiplication is integer addition and divisibility is a subtraction plus a
guard-bit test.  The packing is storage only; each :class:`MonomialOrder`
re-encodes monomials so that its comparison is plain integer comparison.
"""

from __future__ import annotations

from typing import NamedTuple

from .errors import BadIndex

FIELD_BITS = 16
FIELD_MASK = (1 << FIELD_BITS) - 1
FIELD_MAX = (1 << (FIELD_BITS - 1)) - 1


class Variable(NamedTuple):
    """One indeterminate: kind 'x' with (row, col), 'T' with a facet tuple, or 't'."""

    kind: str
    index: tuple

    @staticmethod
    def x(row, col):
        return Variable("x", (row, col))

    @staticmethod
    def T(facet):
        return Variable("T", tuple(facet))

    @staticmethod
    def t():
        return Variable("t", ())

    def __str__(self):
        if self.kind == "x":
            i, j = self.index
            if i <= 9 and j <= 9:
                return f"x{i}{j}"
            return "x{%d,%d}" % (i, j)
        if self.kind == "T":
            if all(v <= 9 for v in self.index):
                return "T" + "".join(str(v) for v in self.index)
            return "T{" + ",".join(str(v) for v in self.index) + "}"
        return "t"


def check_facet(facet, m, n):
    """Validate a strictly increasing m-tuple over [1, n]."""
    facet = tuple(facet)
    if len(facet) != m:
        raise BadIndex(f"facet {facet} does not have {m} vertices")
    if any(not 1 <= v <= n for v in facet):
        raise BadIndex(f"facet {facet} has a vertex outside [1, {n}]")
    if any(facet[i] >= facet[i + 1] for i in range(m - 1)):
        raise BadIndex(f"facet {facet} is not strictly increasing")
    return facet


class PolyRing:
    """Immutable polynomial ring description plus monomial packing tables."""

    __slots__ = (
        "m",
        "n",
        "facets",
        "with_x",
        "with_t",
        "variables",
        "nvars",
        "guard",
        "_var_index",
        "_shifts",
        "_order_cache",
        "_key",
    )

    def __init__(self, m, n, facets=(), with_t=False, with_x=True):
        if not 1 <= m <= n:
            raise BadIndex(f"need 1 <= m <= n, got m={m}, n={n}")
        self.m = m
        self.n = n
        self.facets = tuple(sorted(check_facet(f, m, n) for f in facets))
        if len(set(self.facets)) != len(self.facets):
            raise BadIndex("duplicate facets")
        self.with_x = bool(with_x)
        self.with_t = bool(with_t)
        variables = []
        if self.with_x:
            variables += [
                Variable.x(i, j) for i in range(1, m + 1) for j in range(1, n + 1)
            ]
        variables += [Variable.T(f) for f in self.facets]
        if self.with_t:
            variables.append(Variable.t())
        if not variables:
            raise BadIndex("ring needs at least one variable")
        self.variables = tuple(variables)
        self.nvars = len(variables)
        self._var_index = {v: k for k, v in enumerate(variables)}
        self._shifts = tuple(
            FIELD_BITS * (self.nvars - 1 - k) for k in range(self.nvars)
        )
        self.guard = sum(1 << (s + FIELD_BITS - 1) for s in self._shifts)
        self._order_cache = {}
        self._key = (m, n, self.facets, self.with_t, self.with_x)

    def __eq__(self, other):
        return isinstance(other, PolyRing) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        parts = [f"{self.m}x{self.n} matrix"]
        if self.facets:
            parts.append(f"{len(self.facets)} T-variables")
        if self.with_t:
            parts.append("t")
        return f"PolyRing({', '.join(parts)})"

    # -- variable lookup -------------------------------------------------

    def index_of(self, var):
        try:
            return self._var_index[var]
        except KeyError:
            raise BadIndex(f"{var} is not a variable of {self!r}") from None

    def has_variable(self, var):
        return var in self._var_index

    def x_index(self, i, j):
        if not self.with_x:
            raise BadIndex("ring has no x variables")
        if not (1 <= i <= self.m and 1 <= j <= self.n):
            raise BadIndex(f"x[{i},{j}] outside the {self.m}x{self.n} matrix")
        return (i - 1) * self.n + (j - 1)

    def x_indices(self):
        return range(self.m * self.n) if self.with_x else range(0)

    def T_indices(self):
        base = self.m * self.n if self.with_x else 0
        return range(base, base + len(self.facets))

    def T_index(self, facet):
        return self.index_of(Variable.T(facet))

    def t_index(self):
        if not self.with_t:
            raise BadIndex("ring has no t variable")
        return self.nvars - 1

    # -- packing ----------------------------------------------------------

    def pack(self, exponents):
        """Pack {var index or Variable: exponent} into a monomial int."""
        mono = 0
        for key, e in exponents.items():
            if e == 0:
                continue
            if e < 0 or e > FIELD_MAX:
                raise BadIndex(f"exponent {e} out of range")
            idx = key if isinstance(key, int) else self.index_of(key)
            mono += e << self._shifts[idx]
        return mono

    def unpack(self, mono):
        """Exponent list indexed by variable position."""
        return [(mono >> s) & FIELD_MASK for s in self._shifts]

    def exponents(self, mono):
        """Sparse {Variable: exponent} view of a packed monomial."""
        out = {}
        for k, s in enumerate(self._shifts):
            e = (mono >> s) & FIELD_MASK
            if e:
                out[self.variables[k]] = e
        return out

    def exponent(self, mono, idx):
        return (mono >> self._shifts[idx]) & FIELD_MASK

    def total_degree(self, mono):
        d = 0
        while mono:
            d += mono & FIELD_MASK
            mono >>= FIELD_BITS
        return d

    def block_degree(self, mono, indices):
        return sum((mono >> self._shifts[k]) & FIELD_MASK for k in indices)

    def t_degree(self, mono):
        return (mono >> self._shifts[self.nvars - 1]) & FIELD_MASK if self.with_t else 0

    def T_degree(self, mono):
        return self.block_degree(mono, self.T_indices())

    def mono_divides(self, a, b):
        d = b - a
        return d >= 0 and not (d & self.guard)

    def mono_lcm(self, a, b):
        ea, eb = self.unpack(a), self.unpack(b)
        return self.pack({k: max(x, y) for k, (x, y) in enumerate(zip(ea, eb))})

    def mono_gcd(self, a, b):
        ea, eb = self.unpack(a), self.unpack(b)
        return self.pack({k: min(x, y) for k, (x, y) in enumerate(zip(ea, eb))})

    def mono_str(self, mono):
        if mono == 0:
            return "1"
        parts = []
        for k, s in enumerate(self._shifts):
            e = (mono >> s) & FIELD_MASK
            if e:
                v = str(self.variables[k])
                parts.append(v if e == 1 else f"{v}^{e}")
        return "*".join(parts)

    # -- orders -----------------------------------------------------------

    def order(self, name):
        """Shared order view; names: lex_x, lex_x_prime, deglex, elim_t, elim_x."""
        view = self._order_cache.get(name)
        if view is None:
            view = _build_order(self, name)
            self._order_cache[name] = view
        return view


class MonomialOrder:
    """A term order realized as a field permutation with degree prefixes.

    ``key`` maps a canonically packed monomial to an int whose natural
    comparison is the order; keys remain multiplicative (key of a product is
    the sum of keys), so the Groebner engine can work on keys directly.
    """

    __slots__ = (
        "ring",
        "name",
        "fields",
        "guard",
        "_src_shifts",
        "_dst_shifts",
        "_var_field",
        "_deg_fields",
        "_exp_cache",
    )

    def __init__(self, ring, name, fields):
        # fields: sequence of ("deg", (var idx, ...)) / ("var", idx), most
        # significant first; every variable appears in exactly one "var" field.
        self.ring = ring
        self.name = name
        self.fields = tuple(fields)
        seen = [idx for kind, payload in fields if kind == "var" for idx in (payload,)]
        if sorted(seen) != list(range(ring.nvars)):
            raise ValueError(f"order {name} does not cover the variables exactly once")
        nf = len(self.fields)
        self._dst_shifts = tuple(FIELD_BITS * (nf - 1 - k) for k in range(nf))
        self._src_shifts = ring._shifts
        self.guard = sum(1 << (s + FIELD_BITS - 1) for s in self._dst_shifts)
        var_field = {}
        deg_fields = []
        for pos, (kind, payload) in enumerate(self.fields):
            if kind == "var":
                var_field[payload] = pos
            else:
                deg_fields.append((pos, payload))
        self._var_field = var_field  # ring var idx -> field position
        self._deg_fields = deg_fields
        self._exp_cache = {}

    def key(self, mono):
        src = self._src_shifts
        out = 0
        for (kind, payload), dst in zip(self.fields, self._dst_shifts):
            if kind == "var":
                out += ((mono >> src[payload]) & FIELD_MASK) << dst
            else:
                d = 0
                for idx in payload:
                    d += (mono >> src[idx]) & FIELD_MASK
                out += d << dst
        return out

    def unkey(self, key):
        out = 0
        for (kind, payload), dst in zip(self.fields, self._dst_shifts):
            if kind == "var":
                out += ((key >> dst) & FIELD_MASK) << self._src_shifts[payload]
        return out

    def key_exponents(self, key):
        """Cached exponent vector (indexed by ring variable) behind a key."""
        exps = self._exp_cache.get(key)
        if exps is None:
            exps = tuple(
                (key >> self._dst_shifts[self._var_field[idx]]) & FIELD_MASK
                for idx in range(self.ring.nvars)
            )
            if len(self._exp_cache) < 200000:
                self._exp_cache[key] = exps
        return exps

    def key_from_exponents(self, exps):
        dst = self._dst_shifts
        out = 0
        for idx, e in enumerate(exps):
            if e:
                out += e << dst[self._var_field[idx]]
        for pos, payload in self._deg_fields:
            d = 0
            for idx in payload:
                d += exps[idx]
            if d:
                out += d << dst[pos]
        return out

    def key_lcm(self, ka, kb):
        """Key of the lcm of the monomials behind two keys."""
        ea = self.key_exponents(ka)
        eb = self.key_exponents(kb)
        return self.key_from_exponents(
            [a if a >= b else b for a, b in zip(ea, eb)]
        )

    def key_divides(self, ka, kb):
        d = kb - ka
        return d >= 0 and not (d & self.guard)

    def total_degree(self, key):
        return sum(self.key_exponents(key))

    def compare(self, a, b):
        """-1, 0, or 1 comparing canonical monomials ``a`` and ``b``."""
        ka, kb = self.key(a), self.key(b)
        return (ka > kb) - (ka < kb)

    def sort_terms(self, monos, reverse=True):
        return sorted(monos, key=self.key, reverse=reverse)

    def __repr__(self):
        return f"MonomialOrder({self.name} on {self.ring!r})"


def _build_order(ring, name):
    x_idx = list(ring.x_indices())
    T_idx = list(ring.T_indices())
    t_idx = [ring.nvars - 1] if ring.with_t else []
    if name == "lex_x":
        if T_idx or t_idx or not x_idx:
            raise ValueError("lex_x is total only on x-variable rings; use a richer order")
        fields = [("var", k) for k in x_idx]
    elif name == "lex_x_prime":
        # t-degree first, ties by lex on the x part; T variables break remaining ties
        fields = [("var", k) for k in t_idx]
        fields += [("var", k) for k in x_idx]
        fields += [("var", k) for k in T_idx]
        if not t_idx:
            raise ValueError("lex_x_prime needs the t variable")
    elif name == "deglex":
        fields = [("deg", tuple(range(ring.nvars)))]
        fields += [("var", k) for k in range(ring.nvars)]
    elif name == "elim_t":
        if not t_idx:
            raise ValueError("elim_t needs the t variable")
        rest = x_idx + T_idx
        fields = [("var", t_idx[0]), ("deg", tuple(rest))]
        fields += [("var", k) for k in rest]
    elif name == "elim_x":
        rest = T_idx + t_idx
        fields = [("deg", tuple(x_idx))]
        fields += [("var", k) for k in x_idx]
        if rest:
            fields += [("deg", tuple(rest))]
            fields += [("var", k) for k in rest]
    else:
        raise ValueError(f"unknown order {name!r}")
    return MonomialOrder(ring, name, fields)


def block_elimination(ring, blocks):
    """Block order: earlier blocks are eliminated first (degree, then lex within)."""
    idxs = [[ring.index_of(v) if not isinstance(v, int) else v for v in blk] for blk in blocks]
    flat = [k for blk in idxs for k in blk]
    if sorted(flat) != list(range(ring.nvars)):
        raise ValueError("blocks must partition the ring variables")
    fields = []
    for blk in idxs:
        fields.append(("deg", tuple(blk)))
        fields += [("var", k) for k in blk]
    return MonomialOrder(ring, f"block{tuple(map(tuple, idxs))}", fields)


class Monomial:
    """A single power product bound to its ring."""

    __slots__ = ("ring", "packed")

    def __init__(self, ring, packed):
        self.ring = ring
        self.packed = packed

    @classmethod
    def from_exponents(cls, ring, exponents):
        return cls(ring, ring.pack(exponents))

    def exponents(self):
        return self.ring.exponents(self.packed)

    def degree(self):
        return self.ring.total_degree(self.packed)

    def __mul__(self, other):
        if isinstance(other, Monomial):
            if other.ring != self.ring:
                raise BadIndex("monomials from different rings")
            return Monomial(self.ring, self.packed + other.packed)
        return NotImplemented

    def divides(self, other):
        return self.ring.mono_divides(self.packed, other.packed)

    def __eq__(self, other):
        return (
            isinstance(other, Monomial)
            and self.ring == other.ring
            and self.packed == other.packed
        )

    def __hash__(self):
        return hash((self.ring, self.packed))

    def __str__(self):
        return self.ring.mono_str(self.packed)

    def __repr__(self):
        return f"Monomial({self})"
