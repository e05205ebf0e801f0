"""Finite renormalisations at scalar level.

Counterterm maps and prescriptions are multiplicative graph functionals,
normalised to 1 on a single point. The group law and the action are the
spanning-subgraph convolutions

    (c1 ∘ c2)(Γ) = Σ_γ c1(γ) c2(Γ/γ),      c[f](Γ) = Σ_γ c(γ) f(Γ/γ),

where γ runs over edge subsets of Γ (all vertices kept) and Γ/γ contracts
each component of γ to a point, surviving edges becoming loops if needed.

Graphs are untyped: every vertex has kind ``point`` and its degree as
valence, so the universe (≤ max_vertices vertices, ≤ max_edges edges) is
closed under contraction.
"""

from __future__ import annotations

import random
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from math import inf

from .errors import ConfigurationError, DomainError, NotConnectable
from .graphs import MultiGraph, canonical_code

# ------------------------------------------------------------ graph plumbing


def _normalise(n: int, edges) -> tuple:
    return n, tuple(sorted(tuple(sorted(e)) for e in edges))


@lru_cache(maxsize=None)
def code_of(n: int, edges: tuple) -> bytes:
    return canonical_code(MultiGraph.points(n, edges))


def _components(n: int, edges):
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    roots = {}
    comp = [0] * n
    for v in range(n):
        r = find(v)
        comp[v] = roots.setdefault(r, len(roots))
    return comp, len(roots)


@lru_cache(maxsize=None)
def component_codes(n: int, edges: tuple) -> tuple:
    """Sorted codes of the connected components; isolated points included."""
    comp, k = _components(n, edges)
    members = [[] for _ in range(k)]
    for v in range(n):
        members[comp[v]].append(v)
    out = []
    for vs in members:
        idx = {v: i for i, v in enumerate(vs)}
        es = tuple(sorted((idx[a], idx[b]) for a, b in edges if a in idx))
        out.append(code_of(len(vs), es))
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def contract(n: int, edges: tuple, subset: tuple) -> tuple:
    """Γ/γ for the edge indices ``subset``; returns a normalised (n, edges)."""
    chosen = set(subset)
    comp, k = _components(n, [edges[i] for i in chosen])
    rest = [(comp[a], comp[b]) for i, (a, b) in enumerate(edges) if i not in chosen]
    return _normalise(k, rest)


def edge_subsets(m: int):
    for mask in range(1 << m):
        yield tuple(i for i in range(m) if mask >> i & 1)


@lru_cache(maxsize=None)
def _is_one_pi(n: int, edges: tuple) -> bool:
    g = MultiGraph.points(n, edges)
    return g.is_connected() and not g.bridges()


POINT_CODE = code_of(1, ())


class Universe:
    """All connected untyped multigraphs within the size bound, one per class,
    ordered by (vertices, edges)."""

    def __init__(self, max_vertices: int, max_edges: int, graphs):
        self.max_vertices = max_vertices
        self.max_edges = max_edges
        self.graphs = tuple(graphs)
        self._lookup = dict(self.graphs)

    @classmethod
    def build(cls, max_vertices: int = 3, max_edges: int = 6) -> "Universe":
        return _universe(max_vertices, max_edges)

    def __eq__(self, other):
        return isinstance(other, Universe) and (self.max_vertices, self.max_edges) == (
            other.max_vertices, other.max_edges)

    def __hash__(self):
        return hash((self.max_vertices, self.max_edges))

    def __len__(self):
        return len(self.graphs)

    @property
    def codes(self) -> list:
        return [c for c, _ in self.graphs]

    def graph(self, code: bytes) -> tuple:
        return self._lookup[code]

    def one_pi_codes(self) -> list:
        return [c for c, (n, es) in self.graphs if es and _is_one_pi(n, es)]


@lru_cache(maxsize=None)
def _universe(max_vertices: int, max_edges: int) -> Universe:
    seen = {}
    for n in range(1, max_vertices + 1):
        slots = [(a, b) for a in range(n) for b in range(a, n)]
        for e in range(max_edges + 1):
            for edges in combinations_with_replacement(slots, e):
                _, k = _components(n, edges)
                if k != 1:
                    continue
                c = code_of(n, edges)
                if c not in seen:
                    seen[c] = _normalise(n, edges)
    items = sorted(seen.items(), key=lambda kv: (kv[1][0], len(kv[1][1]), kv[0]))
    return Universe(max_vertices, max_edges, tuple(items))


# ------------------------------------------------------------ value algebra

class Poly:
    """Polynomial over the rationals in commuting formal symbols."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: Fraction(v) for k, v in (terms or {}).items() if v}

    @classmethod
    def const(cls, c) -> "Poly":
        return cls({(): c})

    @classmethod
    def symbol(cls, name: str) -> "Poly":
        return cls({((name, 1),): 1})

    def __add__(self, other):
        other = _as_poly(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __mul__(self, other):
        other = _as_poly(other)
        out: dict = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                powers = dict(k1)
                for s, p in k2:
                    powers[s] = powers.get(s, 0) + p
                k = tuple(sorted(powers.items()))
                out[k] = out.get(k, 0) + v1 * v2
        return Poly(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            return self.terms == _as_poly(other).terms
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def constant_value(self):
        """The rational value if this is a constant, else None."""
        if not self.terms:
            return Fraction(0)
        if list(self.terms) == [()]:
            return self.terms[()]
        return None

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for k, v in sorted(self.terms.items()):
            mono = "*".join(s if p == 1 else f"{s}^{p}" for s, p in k)
            parts.append(f"{v}" if not mono else (mono if v == 1 else f"{v}*{mono}"))
        return " + ".join(parts)


def _as_poly(x) -> Poly:
    if isinstance(x, Poly):
        return x
    if isinstance(x, (int, Fraction)):
        return Poly.const(x)
    raise TypeError(f"cannot use {type(x).__name__} as a value")


# ------------------------------------------------------------- functionals

class _Functional:
    """Values on connected classes, extended multiplicatively."""

    def __init__(self, universe: Universe, values: dict):
        self.universe = universe
        self.values = dict(values)

    def _unit(self):
        raise NotImplementedError

    def on_code(self, code: bytes):
        if code == POINT_CODE:
            return self._unit()
        return self.values.get(code, self._zero())

    def __call__(self, n: int, edges=()):
        n, edges = _normalise(n, edges)
        out = self._unit()
        for c in component_codes(n, edges):
            if c != POINT_CODE:
                out = out * self.on_code(c)
        return out

    def _check_same(self, other):
        if self.universe != other.universe:
            raise ConfigurationError("maps are defined on different size bounds")


class CountertermMap(_Functional):
    """Scalar counterterm map; rational values on connected classes."""

    def __init__(self, universe: Universe, values: dict | None = None, one_pi_supported: bool = False):
        values = {k: Fraction(v) for k, v in (values or {}).items() if k != POINT_CODE and Fraction(v)}
        super().__init__(universe, values)
        self.one_pi_supported = one_pi_supported
        if one_pi_supported:
            for code in self.values:
                n, es = universe.graph(code)
                if not _is_one_pi(n, es):
                    raise DomainError("a 1PI-supported map has a value on a non-1PI graph")

    def _unit(self):
        return Fraction(1)

    def _zero(self):
        return Fraction(0)

    @classmethod
    def identity(cls, universe: Universe) -> "CountertermMap":
        return cls(universe, {}, one_pi_supported=True)

    @classmethod
    def random(cls, universe: Universe, rng: random.Random, one_pi_supported=False,
               density: float = 0.5, span: int = 5) -> "CountertermMap":
        pool = universe.one_pi_codes() if one_pi_supported else [c for c in universe.codes if c != POINT_CODE]
        values = {c: Fraction(rng.randint(-span, span), rng.randint(1, span))
                  for c in pool if rng.random() < density}
        return cls(universe, values, one_pi_supported)

    def __eq__(self, other):
        return isinstance(other, CountertermMap) and self.universe == other.universe and self.values == other.values

    def __repr__(self):
        return f"CountertermMap({len(self.values)} nonzero values)"

    def to_json(self) -> dict:
        from .exact import frac_str

        return {"values": {c.hex(): frac_str(v) for c, v in sorted(self.values.items())},
                "one_pi_supported": self.one_pi_supported}

    @classmethod
    def from_json(cls, universe: Universe, data: dict) -> "CountertermMap":
        flags = data.get("one_pi_supported", False)
        raw = data.get("values", {k: v for k, v in data.items() if k != "one_pi_supported"})
        known = set(universe.codes)
        values = {}
        for h, v in raw.items():
            try:
                code = bytes.fromhex(h)
            except ValueError:
                raise ConfigurationError(f"bad canonical code {h!r}") from None
            if code not in known:
                raise ConfigurationError(f"graph {h[:16]}... is outside the size bound")
            values[code] = Fraction(v)
        return cls(universe, values, flags)


class Prescription(_Functional):
    """Prescription with values in the toy polynomial algebra."""

    def __init__(self, universe: Universe, values: dict | None = None):
        super().__init__(universe, {k: _as_poly(v) for k, v in (values or {}).items() if k != POINT_CODE})

    def _unit(self):
        return Poly.const(1)

    def _zero(self):
        return Poly()

    def __eq__(self, other):
        if not isinstance(other, Prescription) or self.universe != other.universe:
            return False
        return all(self.on_code(c) == other.on_code(c) for c in self.universe.codes)

    def __repr__(self):
        return f"Prescription({len(self.values)} values)"

    @classmethod
    def symbolic(cls, universe: Universe) -> "Prescription":
        """One symbol per 1PI class; other connected graphs take the product
        over their bridgeless pieces."""
        names = {c: f"s{i}" for i, c in enumerate(universe.one_pi_codes())}
        values = {}
        for code, (n, es) in universe.graphs:
            if not es:
                continue
            if code in names:
                values[code] = Poly.symbol(names[code])
                continue
            g = MultiGraph.points(n, es)
            bridges = set(g.bridges())
            inner = tuple(e for k, e in enumerate(g.edges) if k not in bridges)
            v = Poly.const(1)
            for c in component_codes(n, inner):
                if c != POINT_CODE:
                    v = v * Poly.symbol(names[c])
            values[code] = v
        return cls(universe, values)

    @classmethod
    def delta(cls, universe: Universe) -> "Prescription":
        """F₀: 1 on edgeless graphs, 0 on every graph with an edge."""
        return cls(universe, {})

    def to_json(self) -> dict:
        return {c.hex(): repr(v) for c, v in sorted(self.values.items())}


# ---------------------------------------------------------------- operations

@lru_cache(maxsize=None)
def spanning_table(n: int, edges: tuple) -> tuple:
    """Per edge subset γ: (non-point component codes of γ, of Γ/γ, |γ|)."""
    rows = []
    for sub in edge_subsets(len(edges)):
        gamma = component_codes(*_normalise(n, [edges[i] for i in sub]))
        quot = component_codes(*contract(n, edges, sub))
        rows.append((tuple(c for c in gamma if c != POINT_CODE),
                     tuple(c for c in quot if c != POINT_CODE), len(sub)))
    return tuple(rows)


def _product(f: _Functional, codes):
    out = f._unit()
    for c in codes:
        out = out * f.on_code(c)
    return out


def _convolve(c: CountertermMap, f: _Functional, n: int, edges: tuple, proper: bool = False):
    total = f._zero()
    for gamma, quot, size in spanning_table(n, edges):
        if proper and size == len(edges):
            continue
        cv = _product(c, gamma)
        if cv:
            total = total + _product(f, quot) * cv
    return total


def compose(c1: CountertermMap, c2: CountertermMap) -> CountertermMap:
    c1._check_same(c2)
    U = c1.universe
    vals = {code: _convolve(c1, c2, n, es) for code, (n, es) in U.graphs if es}
    out = CountertermMap(U, vals)
    out.one_pi_supported = all(_is_one_pi(*U.graph(code)) for code in out.values)
    return out


def inverse(c: CountertermMap) -> CountertermMap:
    """inv(Γ) = −Σ_{γ ⊊ Γ} inv(γ) c(Γ/γ), by increasing graph size."""
    U = c.universe
    inv = CountertermMap(U, {})
    for code, (n, es) in U.graphs:  # ordered by (vertices, edges)
        if es:
            total = _convolve(inv, c, n, es, proper=True)
            if total:
                inv.values[code] = -total
    inv.one_pi_supported = all(_is_one_pi(*U.graph(k)) for k in inv.values)
    return inv


def act(c: CountertermMap, f: Prescription) -> Prescription:
    c._check_same(f)
    return Prescription(c.universe, {code: _convolve(c, f, n, es) for code, (n, es) in c.universe.graphs if es})


def _compose_elementary(code: bytes, r: Fraction, c: CountertermMap) -> CountertermMap:
    """compose(e, c) for e equal to r on one class and trivial elsewhere."""
    U = c.universe
    vals = {}
    for g, (n, es) in U.graphs:
        if not es:
            continue
        total = Fraction(0)
        for gamma, quot, _ in spanning_table(n, es):
            if all(x == code for x in gamma):
                total += r ** len(gamma) * _product(c, quot)
        vals[g] = total
    return CountertermMap(U, vals)


def transitive_connector(f1: Prescription, f2: Prescription) -> CountertermMap:
    """c with act(c, f1) == f2, fixing the smallest disagreeing class each round."""
    f1._check_same(f2)
    U = f1.universe
    c = CountertermMap.identity(U)
    for code, (n, es) in U.graphs:
        if not es:
            continue
        have = _convolve(c, f1, n, es)
        want = f2.on_code(code)
        if have == want:
            continue
        r = (want - have).constant_value()
        if r is None:
            raise NotConnectable(
                f"difference {want - have!r} on graph {code.hex()[:16]}... is not a scalar multiple of the point value")
        c = _compose_elementary(code, r, c)
    if act(c, f1) != f2:
        raise NotConnectable("layered construction did not converge")
    return c


def stabilizer_is_trivial(U: Universe, trials: int = 20, seed: int = 0) -> bool:
    """Smoke test: act(c, F₀) = c, so only the identity fixes F₀; random
    nonidentity maps are checked to move it."""
    F0 = Prescription.delta(U)
    rng = random.Random(seed)
    for _ in range(trials):
        c = CountertermMap.random(U, rng)
        moved = act(c, F0) != F0
        if moved != (c != CountertermMap.identity(U)):
            return False
    return True


# -------------------------------------------------------------- power counting

UNBOUNDED = inf


def field_degree(d) -> Fraction:
    return Fraction(d, 2) - 1


def term_degree(term, d) -> Fraction:
    """Scaling degree of a monomial in one scalar field.

    ``term`` is a field-algebra monomial key, a one-term FieldPolynomial, or
    a pair ``(field_count, derivative_count)``.
    """
    if d < 2:
        raise DomainError("spacetime dimension must be at least 2")
    if isinstance(term, tuple) and len(term) == 2 and all(isinstance(x, int) for x in term):
        k, derivs = term
    else:
        if hasattr(term, "terms"):
            if len(term.terms) != 1:
                raise DomainError("expected a single monomial")
            (term,) = term.terms
        facs, _ = term
        names = {name for name, _ in facs}
        if len(names) > 1:
            raise DomainError("power counting here is for a single scalar field")
        k = len(facs)
        derivs = sum(sum(w) for _, w in facs)
    return k * field_degree(d) + derivs


def dyson_max_power(d) -> int | float:
    """Largest k with k·(d/2 − 1) ≤ d; unbounded in d = 2."""
    if d < 2:
        raise DomainError("spacetime dimension must be at least 2")
    deg = field_degree(d)
    if deg == 0:
        return UNBOUNDED
    return int(Fraction(d) / deg)
