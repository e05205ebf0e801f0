"""Polynomial algebra of Lagrangians in fields and their coordinate derivatives.

A monomial is a product of field factors ``d^alpha phi`` (``alpha`` a
multi-index over the ``n`` spacetime coordinates) and formal constants such
as ``m`` or ``lambda``. Coefficients are Gaussian rationals; no floats.

All index contractions are expanded over concrete coordinates with a
diagonal metric, so everything stays a plain commutative polynomial ring.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

from .errors import ConfigurationError, NotASymmetry
from .exact import QI, ONE, ZERO, solve_exact

VAR_PREFIX = "δ"

# A field factor is (name, derivative multi-index); a monomial key is
# (sorted tuple of field factors with repetition, sorted tuple of (constant, power)).
Factor = tuple
MonoKey = tuple


def variation_name(name: str) -> str:
    return VAR_PREFIX + name


def is_variation(name: str) -> bool:
    return name.startswith(VAR_PREFIX)


@dataclass(frozen=True)
class FieldSymbol:
    name: str
    conjugate_of: str | None = None
    dimension_hint: Fraction | None = None

    @property
    def partner(self) -> str:
        return self.conjugate_of or self.name


@dataclass(frozen=True)
class Metric:
    signature: tuple

    def __post_init__(self):
        if any(s not in (1, -1) for s in self.signature):
            raise ConfigurationError("metric entries must be +1 or -1")

    @classmethod
    def minkowski(cls, n: int) -> "Metric":
        return cls((1,) + (-1,) * (n - 1)) if n else cls(())

    @classmethod
    def parse(cls, text: str) -> "Metric":
        """Parse the ``+---`` style string."""
        return cls(tuple(1 if c == "+" else -1 for c in text.strip() if c in "+-"))

    def __len__(self):
        return len(self.signature)

    def __getitem__(self, mu):
        return self.signature[mu]


def _add_words(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def _unit(n: int, mu: int) -> tuple:
    return tuple(1 if i == mu else 0 for i in range(n))


def _key_mul(k1: MonoKey, k2: MonoKey) -> MonoKey:
    f = tuple(sorted(k1[0] + k2[0]))
    c = Counter(dict(k1[1]))
    c.update(dict(k2[1]))
    return f, tuple(sorted(c.items()))


class FieldPolynomial:
    """Immutable sparse polynomial over Gaussian rationals."""

    __slots__ = ("n", "terms", "_hash")

    def __init__(self, n: int, terms: Mapping[MonoKey, QI] | None = None):
        self.n = n
        clean = {}
        for k, v in (terms or {}).items():
            v = QI.coerce(v)
            if v:
                clean[k] = v
        self.terms = clean
        self._hash = None

    # -- constructors
    @classmethod
    def zero(cls, n: int) -> "FieldPolynomial":
        return cls(n)

    @classmethod
    def constant(cls, n: int, c) -> "FieldPolynomial":
        return cls(n, {((), ()): QI.coerce(c)})

    @classmethod
    def atom(cls, n: int, name: str, word: Sequence[int] | None = None) -> "FieldPolynomial":
        word = tuple(word) if word is not None else (0,) * n
        if len(word) != n:
            raise ConfigurationError(f"derivative word {word} has wrong length for n={n}")
        return cls(n, {(((name, word),), ()): ONE})

    @classmethod
    def param(cls, n: int, name: str, power: int = 1) -> "FieldPolynomial":
        return cls(n, {((), ((name, power),)): ONE})

    # -- basic protocol
    def __eq__(self, other):
        if isinstance(other, FieldPolynomial):
            return self.n == other.n and self.terms == other.terms
        if isinstance(other, (int, Fraction, QI)):
            return self == FieldPolynomial.constant(self.n, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def _lift(self, other) -> "FieldPolynomial":
        if isinstance(other, FieldPolynomial):
            if other.n != self.n:
                raise ConfigurationError("mixing polynomials of different dimension")
            return other
        return FieldPolynomial.constant(self.n, other)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, ZERO) + v
        return FieldPolynomial(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return FieldPolynomial(self.n, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def scale(self, c) -> "FieldPolynomial":
        c = QI.coerce(c)
        return FieldPolynomial(self.n, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, FieldPolynomial):
            return self.scale(other)
        other = self._lift(other)
        out: dict = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = _key_mul(k1, k2)
                out[k] = out.get(k, ZERO) + v1 * v2
        return FieldPolynomial(self.n, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = FieldPolynomial.constant(self.n, 1)
        for _ in range(k):
            out = out * self
        return out

    # -- calculus
    def d(self, mu: int) -> "FieldPolynomial":
        """Total derivative in coordinate ``mu`` (Leibniz over field factors)."""
        if not 0 <= mu < self.n:
            raise ConfigurationError(f"derivative index {mu} outside 0..{self.n - 1}")
        e = _unit(self.n, mu)
        out: dict = {}
        for (facs, params), coef in self.terms.items():
            for i, (name, word) in enumerate(facs):
                if i and facs[i - 1] == facs[i]:
                    continue
                mult = facs.count(facs[i])
                rest = facs[:i] + facs[i + 1:]
                new = tuple(sorted(rest + ((name, _add_words(word, e)),)))
                k = (new, params)
                out[k] = out.get(k, ZERO) + coef * mult
        return FieldPolynomial(self.n, out)

    def dword(self, word: Sequence[int]) -> "FieldPolynomial":
        out = self
        for mu, k in enumerate(word):
            for _ in range(k):
                out = out.d(mu)
        return out

    def partial(self, factor: Factor) -> "FieldPolynomial":
        """Formal partial derivative with respect to one field factor."""
        out: dict = {}
        for (facs, params), coef in self.terms.items():
            k = facs.count(factor)
            if not k:
                continue
            i = facs.index(factor)
            rest = facs[:i] + facs[i + 1:]
            key = (rest, params)
            out[key] = out.get(key, ZERO) + coef * k
        return FieldPolynomial(self.n, out)

    def substitute(self, rule) -> "FieldPolynomial":
        """Replace field factors: ``rule(name, word)`` returns a polynomial or None."""
        out = FieldPolynomial.zero(self.n)
        for (facs, params), coef in self.terms.items():
            acc = FieldPolynomial(self.n, {((), params): coef})
            kept = []
            for name, word in facs:
                rep = rule(name, word)
                if rep is None:
                    kept.append((name, word))
                else:
                    acc = acc * rep
            if kept:
                acc = acc * FieldPolynomial(self.n, {(tuple(sorted(kept)), ()): ONE})
            out = out + acc
        return out

    # -- inspection
    def field_names(self) -> set:
        return {name for (facs, _), _ in self.terms.items() for name, _ in facs}

    def factors(self) -> set:
        return {f for (facs, _), _ in self.terms.items() for f in facs}

    def max_order(self) -> int:
        return max((sum(w) for (facs, _) in self.terms for _, w in facs), default=0)

    def max_degree(self) -> int:
        return max((len(facs) for (facs, _) in self.terms), default=0)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: repr(kv[0]))

    def __repr__(self):
        from .parser import format_polynomial

        return f"FieldPolynomial({format_polynomial(self)!r})"


@dataclass(frozen=True)
class Theory:
    """Field configuration: spacetime dimension, metric, fields and constants."""

    dim: int
    fields: tuple
    metric: Metric = None
    constants: tuple = ("m", "lambda")

    def __post_init__(self):
        if self.metric is None:
            object.__setattr__(self, "metric", Metric.minkowski(self.dim))
        if len(self.metric) != self.dim:
            raise ConfigurationError("metric length must equal the dimension")
        names = [f.name for f in self.fields]
        if len(set(names)) != len(names):
            raise ConfigurationError("duplicate field names")
        for f in self.fields:
            if f.conjugate_of is not None:
                partner = self.symbol(f.conjugate_of)
                if partner.partner != f.name:
                    raise ConfigurationError(f"conjugation of {f.name} is not an involution")

    @classmethod
    def build(cls, dim: int, real=(), complex_=(), metric=None, constants=("m", "lambda")):
        syms = [FieldSymbol(r) for r in real]
        for c in complex_:
            syms.append(FieldSymbol(c, conjugate_of=c + "*"))
            syms.append(FieldSymbol(c + "*", conjugate_of=c))
        return cls(dim, tuple(syms), metric, tuple(constants))

    def symbol(self, name: str) -> FieldSymbol:
        for f in self.fields:
            if f.name == name:
                return f
        raise ConfigurationError(f"unknown field {name!r}")

    @property
    def field_names(self) -> list:
        return [f.name for f in self.fields]

    def conj(self, name: str) -> str:
        return self.symbol(name).partner

    # -- builders
    def f(self, name: str, *derivs: int) -> FieldPolynomial:
        """Field ``name`` differentiated by the listed coordinates."""
        self.symbol(name)
        word = [0] * self.dim
        for mu in derivs:
            if not 0 <= mu < self.dim:
                raise ConfigurationError(f"derivative index {mu} outside 0..{self.dim - 1}")
            word[mu] += 1
        return FieldPolynomial.atom(self.dim, name, word)

    def c(self, name: str, power: int = 1) -> FieldPolynomial:
        return FieldPolynomial.param(self.dim, name, power)

    def num(self, x) -> FieldPolynomial:
        return FieldPolynomial.constant(self.dim, x)

    def contract(self, a: FieldPolynomial, b: FieldPolynomial) -> FieldPolynomial:
        """``d_mu a d^mu b`` expanded over coordinates."""
        out = FieldPolynomial.zero(self.dim)
        for mu in range(self.dim):
            out = out + (a.d(mu) * b.d(mu)).scale(self.metric[mu])
        return out

    def box(self, a: FieldPolynomial) -> FieldPolynomial:
        out = FieldPolynomial.zero(self.dim)
        for mu in range(self.dim):
            out = out + a.d(mu).d(mu).scale(self.metric[mu])
        return out

    def check(self, poly: FieldPolynomial, allow_variations: bool = False) -> None:
        if poly.n != self.dim:
            raise ConfigurationError(f"polynomial dimension {poly.n} != theory dimension {self.dim}")
        known = set(self.field_names)
        for name in poly.field_names():
            if allow_variations and is_variation(name) and name[len(VAR_PREFIX):] in known:
                continue
            if name not in known:
                raise ConfigurationError(f"unknown field {name!r}")


# ------------------------------------------------------------------ variation

@dataclass(frozen=True)
class VariationResult:
    el_terms: dict
    boundary_current: tuple

    def reassemble(self, theory: Theory) -> FieldPolynomial:
        """``sum_phi dphi*el[phi] + sum_mu d_mu J^mu``."""
        out = FieldPolynomial.zero(theory.dim)
        for name, el in self.el_terms.items():
            out = out + FieldPolynomial.atom(theory.dim, variation_name(name)) * el
        for mu, j in enumerate(self.boundary_current):
            out = out + j.d(mu)
        return out


def literal_variation(theory: Theory, L: FieldPolynomial) -> FieldPolynomial:
    """delta L by the Leibniz rule, variations left under the derivatives."""
    theory.check(L)
    out: dict = {}
    for (facs, params), coef in L.terms.items():
        for i, (name, word) in enumerate(facs):
            if i and facs[i - 1] == facs[i]:
                continue
            mult = facs.count(facs[i])
            rest = facs[:i] + facs[i + 1:]
            key = (tuple(sorted(rest + ((variation_name(name), word),))), params)
            out[key] = out.get(key, ZERO) + coef * mult
    return FieldPolynomial(theory.dim, out)


def vary(theory: Theory, L: FieldPolynomial) -> VariationResult:
    """Integrate delta L by parts until no variation carries a derivative.

    Derivatives are peeled off the variation one at a time, lowest
    coordinate index first; this makes the boundary current deterministic
    and linear in ``L``.
    """
    theory.check(L)
    n = theory.dim
    el = {name: FieldPolynomial.zero(n) for name in theory.field_names}
    current = [FieldPolynomial.zero(n) for _ in range(n)]
    for (facs, params), coef in L.sorted_terms():
        for i, (name, word) in enumerate(facs):
            if i and facs[i - 1] == facs[i]:
                continue
            mult = facs.count(facs[i])
            rest = FieldPolynomial(n, {(facs[:i] + facs[i + 1:], params): coef * mult})
            word = list(word)
            sign = 1
            while any(word):
                mu = next(k for k, a in enumerate(word) if a)
                word[mu] -= 1
                slot = FieldPolynomial.atom(n, variation_name(name), word)
                current[mu] = current[mu] + (slot * rest).scale(sign)
                rest = rest.d(mu)
                sign = -sign
            el[name] = el[name] + rest.scale(sign)
    return VariationResult(el, tuple(current))


def euler_lagrange(theory: Theory, L: FieldPolynomial) -> dict:
    """``sum_alpha (-1)^|alpha| d^alpha (dL / d(d^alpha phi))`` for each field."""
    theory.check(L)
    n = theory.dim
    out = {}
    facs = L.factors()
    for name in theory.field_names:
        acc = FieldPolynomial.zero(n)
        for fname, word in sorted(facs):
            if fname != name:
                continue
            term = L.partial((fname, word)).dword(word)
            acc = acc + term.scale((-1) ** sum(word))
        out[name] = acc
    return out


def _substitute_variations(theory: Theory, poly: FieldPolynomial, gen: Mapping) -> FieldPolynomial:
    zero = FieldPolynomial.zero(theory.dim)

    def rule(name, word):
        if not is_variation(name):
            return None
        base = name[len(VAR_PREFIX):]
        g = gen.get(base, zero)
        return g.dword(word)

    return poly.substitute(rule)


def noether_current(theory: Theory, L: FieldPolynomial, gen: Mapping, K: Sequence | None = None) -> tuple:
    """Current ``J^mu[gen] - K^mu`` for a symmetry with ``delta L = d_mu K^mu``.

    Raises :class:`NotASymmetry` with the residual when the generator fails.
    """
    n = theory.dim
    for name, g in gen.items():
        theory.symbol(name)
        theory.check(g)
    K = list(K) if K is not None else [FieldPolynomial.zero(n)] * n
    if len(K) != n:
        raise ConfigurationError("K must have one component per coordinate")
    dL = _substitute_variations(theory, literal_variation(theory, L), gen)
    divK = FieldPolynomial.zero(n)
    for mu, k in enumerate(K):
        divK = divK + k.d(mu)
    residual = dL - divK
    if residual:
        raise NotASymmetry("generator is not a symmetry: delta L - d_mu K^mu != 0", residual)
    res = vary(theory, L)
    return tuple(_substitute_variations(theory, J, gen) - k for J, k in zip(res.boundary_current, K))


def divergence(j: Sequence[FieldPolynomial]) -> FieldPolynomial:
    out = FieldPolynomial.zero(j[0].n)
    for mu, c in enumerate(j):
        out = out + c.d(mu)
    return out


# ------------------------------------------------------------- conservation

@dataclass
class ConservationCertificate:
    status: str  # "conserved" | "not_conserved" | "inconclusive"
    divergence: FieldPolynomial
    witness: list = field(default_factory=list)  # (multiplier, field name, derivative word)
    bound: int = 0

    @property
    def conserved(self) -> bool:
        return self.status == "conserved"

    def verify(self, el: Mapping) -> bool:
        if self.status != "conserved":
            return False
        acc = FieldPolynomial.zero(self.divergence.n)
        for c, name, word in self.witness:
            acc = acc + c * el[name].dword(word)
        return acc == self.divergence


def _words(n: int, max_order: int):
    for w in product(range(max_order + 1), repeat=n):
        if sum(w) <= max_order:
            yield w


def _divides(u: MonoKey, s: MonoKey):
    cu, cs = Counter(u[0]), Counter(s[0])
    if any(cs[f] < k for f, k in cu.items()):
        return None
    pu, ps = dict(u[1]), dict(s[1])
    if any(ps.get(p, 0) < k for p, k in pu.items()):
        return None
    cs.subtract(cu)
    fq = tuple(sorted(cs.elements()))
    pq = tuple(sorted((p, ps[p] - pu.get(p, 0)) for p in ps if ps[p] - pu.get(p, 0) > 0))
    return fq, pq


def check_conserved(j: Sequence[FieldPolynomial], el: Mapping, bound: int = 2, rounds: int = 3) -> ConservationCertificate:
    """Search for ``d_mu j^mu = sum_a c_a * D_a el_a`` with ``|D_a| <= bound``.

    Multipliers are drawn from monomial quotients of the divergence by
    monomials of the differentiated EL expressions, closed under the
    monomials those products introduce. ``not_conserved`` means no witness
    exists in the saturated search space at this bound; ``inconclusive``
    means the search space was not exhausted.
    """
    T = divergence(j)
    n = T.n
    if not T:
        return ConservationCertificate("conserved", T, [], bound)
    el = {k: v for k, v in el.items() if v}
    if not el or bound < 0:
        return ConservationCertificate("inconclusive", T, [], bound)
    el_order = max(v.max_order() for v in el.values())
    if T.max_order() > bound + el_order:
        return ConservationCertificate("inconclusive", T, [], bound)

    gens = []
    for name in sorted(el):
        for w in _words(n, bound):
            g = el[name].dword(w)
            if g:
                gens.append((name, w, g))

    deg_cap = T.max_degree()
    ord_cap = max(T.max_order(), el_order + bound)
    targets = set(T.terms)
    candidates: dict = {}
    saturated = False
    for _ in range(rounds):
        new_targets = set()
        for name, w, g in gens:
            for u in g.terms:
                for s in targets:
                    q = _divides(u, s)
                    if q is None or (q, name, w) in candidates:
                        continue
                    prod = FieldPolynomial(n, {q: ONE}) * g
                    candidates[(q, name, w)] = prod
                    for k in prod.terms:
                        if k not in targets and len(k[0]) <= deg_cap and all(sum(wd) <= ord_cap for _, wd in k[0]):
                            new_targets.add(k)
        if not new_targets:
            saturated = True
            break
        targets |= new_targets

    keys = list(candidates)
    sol = solve_exact([candidates[k].terms for k in keys], T.terms, ZERO) if keys else None
    if sol is None:
        return ConservationCertificate("not_conserved" if saturated else "inconclusive", T, [], bound)

    grouped: dict = {}
    for (q, name, w), x in zip(keys, sol):
        if x:
            mono = FieldPolynomial(n, {q: x})
            grouped[(name, w)] = grouped.get((name, w), FieldPolynomial.zero(n)) + mono
    witness = [(c, name, w) for (name, w), c in sorted(grouped.items()) if c]
    cert = ConservationCertificate("conserved", T, witness, bound)
    assert cert.verify(el)
    return cert


# ------------------------------------------------------------------- models

def maxwell(theory_dim: int = 4):
    """Component form of ``-1/4 F^{mu nu} F_{mu nu} - J^mu A_mu``.

    Fields ``A0..A{n-1}`` are the lower-index potential components and
    ``J0..J{n-1}`` the upper-index source; ``F_{mu nu} = d_mu A_nu - d_nu A_mu``.
    Returns ``(theory, L, F_upper)`` with ``F_upper[mu][nu] = F^{mu nu}``.
    """
    n = theory_dim
    names = [f"A{mu}" for mu in range(n)] + [f"J{mu}" for mu in range(n)]
    th = Theory.build(n, real=names)
    g = th.metric
    F = [[th.f(f"A{nu}", mu) - th.f(f"A{mu}", nu) for nu in range(n)] for mu in range(n)]
    Fup = [[F[mu][nu].scale(g[mu] * g[nu]) for nu in range(n)] for mu in range(n)]
    L = FieldPolynomial.zero(n)
    for mu in range(n):
        for nu in range(n):
            L = L + (Fup[mu][nu] * F[mu][nu]).scale(Fraction(-1, 4))
        L = L - th.f(f"J{mu}") * th.f(f"A{mu}")
    return th, L, Fup
