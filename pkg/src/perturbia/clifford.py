"""Clifford algebras C(R^{p,q}): exact blade arithmetic, centres,
classification by periodicity and by recurrence, gamma matrices, CPT."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .errors import ConfigurationError, DomainError
from .exact import QI, nullspace, rank

MAX_BRUTE_N = 8


@dataclass(frozen=True)
class Signature:
    p: int
    q: int

    def __post_init__(self):
        if self.p < 0 or self.q < 0:
            raise DomainError("signature counts must be nonnegative")

    @property
    def n(self) -> int:
        return self.p + self.q

    def square(self, i: int) -> int:
        """e_i² for generator index i (0-based); the first p square to +1."""
        return 1 if i < self.p else -1

    def require_small(self):
        if self.n > MAX_BRUTE_N:
            raise ConfigurationError(f"n = {self.n} exceeds the brute-force bound {MAX_BRUTE_N}")


def grade(mask: int) -> int:
    return bin(mask).count("1")


def blade_product(a: int, b: int, sig: Signature):
    """(sign, mask) with e_a e_b = sign · e_{a xor b}."""
    swaps = 0
    x = a >> 1
    while x:
        swaps += grade(x & b)
        x >>= 1
    sign = -1 if swaps & 1 else 1
    common = a & b
    i = 0
    while common:
        if common & 1:
            sign *= sig.square(i)
        common >>= 1
        i += 1
    return sign, a ^ b


class CliffordElement:
    """Linear combination of blades with exact (Fraction or QI) coefficients."""

    __slots__ = ("sig", "coeffs")

    def __init__(self, sig: Signature, coeffs: dict | None = None):
        self.sig = sig
        full = (1 << sig.n) - 1
        self.coeffs = {}
        for m, c in (coeffs or {}).items():
            if m & ~full:
                raise DomainError(f"blade {m:b} uses generators beyond n={sig.n}")
            if c:
                self.coeffs[m] = c

    @classmethod
    def scalar(cls, sig, c=1) -> "CliffordElement":
        return cls(sig, {0: Fraction(c) if not isinstance(c, QI) else c})

    @classmethod
    def generator(cls, sig, i: int) -> "CliffordElement":
        return cls(sig, {1 << i: Fraction(1)})

    @classmethod
    def blade(cls, sig, mask: int, c=1) -> "CliffordElement":
        return cls(sig, {mask: Fraction(c)})

    @classmethod
    def vector(cls, sig, comps) -> "CliffordElement":
        return cls(sig, {1 << i: Fraction(c) for i, c in enumerate(comps)})

    def __add__(self, other):
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, 0) + c
        return CliffordElement(self.sig, out)

    def __neg__(self):
        return CliffordElement(self.sig, {m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, CliffordElement):
            return CliffordElement(self.sig, {m: c * other for m, c in self.coeffs.items()})
        return multiply(self, other)

    def __rmul__(self, k):
        return CliffordElement(self.sig, {m: k * c for m, c in self.coeffs.items()})

    def __eq__(self, other):
        return isinstance(other, CliffordElement) and self.sig == other.sig and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.sig, tuple(sorted(self.coeffs.items()))))

    def scalar_part(self):
        return self.coeffs.get(0, Fraction(0))

    def is_scalar(self) -> bool:
        return all(m == 0 for m in self.coeffs)

    def grade_part(self, k: int) -> "CliffordElement":
        return CliffordElement(self.sig, {m: c for m, c in self.coeffs.items() if grade(m) == k})

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for m, c in sorted(self.coeffs.items()):
            name = "".join(f"e{i + 1}" for i in range(self.sig.n) if m >> i & 1) or "1"
            parts.append(f"{c}*{name}")
        return " + ".join(parts)


def multiply(a: CliffordElement, b: CliffordElement) -> CliffordElement:
    if a.sig != b.sig:
        raise DomainError("elements live in different algebras")
    out: dict = {}
    for ma, ca in a.coeffs.items():
        for mb, cb in b.coeffs.items():
            s, m = blade_product(ma, mb, a.sig)
            out[m] = out.get(m, 0) + s * ca * cb
    return CliffordElement(a.sig, out)


def involution(x: CliffordElement) -> CliffordElement:
    """α: e_i ↦ −e_i."""
    return CliffordElement(x.sig, {m: (-c if grade(m) % 2 else c) for m, c in x.coeffs.items()})


def transpose(x: CliffordElement) -> CliffordElement:
    """Reverse the order of generators in every blade."""
    return CliffordElement(x.sig, {m: (-c if (grade(m) * (grade(m) - 1) // 2) % 2 else c)
                                   for m, c in x.coeffs.items()})


def conjugate(x: CliffordElement) -> CliffordElement:
    """x̄ = α(xᵗ), i.e. −transpose on generators."""
    return involution(transpose(x))


def spinor_norm(x: CliffordElement):
    n = multiply(x, conjugate(x))
    if not n.is_scalar():
        raise DomainError("x·x̄ is not a scalar; x is not in the Clifford group")
    return n.scalar_part()


def quadratic(x: CliffordElement):
    """q(x) = x² for a vector x."""
    if any(grade(m) != 1 for m in x.coeffs):
        raise DomainError("expected a vector")
    return multiply(x, x).scalar_part()


def bilinear(x: CliffordElement, y: CliffordElement):
    return (quadratic(x + y) - quadratic(x) - quadratic(y)) / 2


def reflect(x: CliffordElement, y: CliffordElement) -> CliffordElement:
    """α(x)·y·x⁻¹ for a non-isotropic vector x."""
    qx = quadratic(x)
    if not qx:
        raise DomainError("cannot reflect in an isotropic vector")
    return multiply(multiply(involution(x), y), x) * (Fraction(1) / qx)


# -------------------------------------------------------------------- centre

def center(sig: Signature, even_only: bool = False) -> list:
    """Basis of the centre (of C, or of the even subalgebra C⁰) by brute force."""
    sig.require_small()
    n = sig.n
    basis = [m for m in range(1 << n) if not even_only or grade(m) % 2 == 0]
    if even_only:
        gens = [(1 << i) | (1 << j) for i in range(n) for j in range(i + 1, n)]
    else:
        gens = [1 << i for i in range(n)]
    col = {m: k for k, m in enumerate(basis)}
    rows = []
    # [z, g] = 0 for each generator g; one row per (g, output blade)
    for g in gens:
        block: dict = {}
        for m in basis:
            s1, r1 = blade_product(m, g, sig)
            s2, r2 = blade_product(g, m, sig)
            block.setdefault(r1, [Fraction(0)] * len(basis))[col[m]] += s1
            block.setdefault(r2, [Fraction(0)] * len(basis))[col[m]] -= s2
        rows.extend(r for r in block.values() if any(r))
    null = nullspace(rows, len(basis), Fraction(0), Fraction(1)) if rows else [
        [Fraction(int(i == k)) for i in range(len(basis))] for k in range(len(basis))]
    return [CliffordElement(sig, {basis[i]: v[i] for i in range(len(basis))}) for v in null]


def center_dimension_rule(n: int, even_only: bool = False) -> int:
    """1 or 2 by parity of n (for n ≥ 1)."""
    if n == 0:
        return 1
    if even_only:
        return 2 if n % 2 == 0 else 1
    return 2 if n % 2 else 1


# ------------------------------------------------------------ classification

RINGS = ("R", "R+R", "C", "H", "H+H")
RING_DIM = {"R": 1, "R+R": 2, "C": 2, "H": 4, "H+H": 8}
SIGNATURE_TABLE = {0: "R", 1: "R+R", 2: "R", 3: "C", 4: "H", 5: "H+H", 6: "H", 7: "C"}
EVEN_TABLE = {0: "R+R", 1: "R", 7: "R", 2: "C", 6: "C", 3: "H", 5: "H", 4: "H+H"}


@dataclass(frozen=True)
class AlgebraType:
    ring: str
    matrix_size: int

    @property
    def real_dimension(self) -> int:
        return self.matrix_size ** 2 * RING_DIM[self.ring]

    def __str__(self):
        ring = self.ring.replace("+", "⊕")
        if self.matrix_size == 1:
            return ring
        if "+" in self.ring:
            a = self.ring.split("+")[0]
            return f"M{self.matrix_size}({a})⊕M{self.matrix_size}({a})"
        return f"M{self.matrix_size}({ring})"

    def to_json(self) -> dict:
        return {"ring": self.ring, "matrix_size": self.matrix_size, "label": str(self)}


def _sized(ring: str, n: int) -> AlgebraType:
    size2, rem = divmod(2 ** n, RING_DIM[ring])
    size = round(size2 ** 0.5)
    if rem or size * size != size2:
        raise AssertionError(f"dimension accounting fails for {ring} at n={n}")
    return AlgebraType(ring, size)


def classify_table(sig: Signature) -> AlgebraType:
    return _sized(SIGNATURE_TABLE[(sig.p - sig.q) % 8], sig.n)


_BASE = {
    (0, 0): AlgebraType("R", 1),
    (1, 0): AlgebraType("R+R", 1),
    (0, 1): AlgebraType("C", 1),
    (2, 0): AlgebraType("R", 2),
    (1, 1): AlgebraType("R", 2),
    (0, 2): AlgebraType("H", 1),
}

_TIMES_H = {"R": ("H", 1), "R+R": ("H+H", 1), "C": ("C", 2), "H": ("R", 4), "H+H": ("R+R", 4)}


def _times_m2(t: AlgebraType) -> AlgebraType:
    return AlgebraType(t.ring, 2 * t.matrix_size)


def _times_h(t: AlgebraType) -> AlgebraType:
    ring, k = _TIMES_H[t.ring]
    return AlgebraType(ring, k * t.matrix_size)


def classify_recursive(sig: Signature) -> AlgebraType:
    """Descend by C(p+2,q) = M₂(R)⊗C(q,p), C(p+1,q+1) = M₂(R)⊗C(p,q),
    C(p,q+2) = H⊗C(q,p) to the six base cases."""
    p, q = sig.p, sig.q
    if (p, q) in _BASE:
        return _BASE[(p, q)]
    if p >= 2:
        return _times_m2(classify_recursive(Signature(q, p - 2)))
    if p >= 1 and q >= 1:
        return _times_m2(classify_recursive(Signature(p - 1, q - 1)))
    return _times_h(classify_recursive(Signature(q - 2, p)))


def classify(sig: Signature) -> AlgebraType:
    a, b = classify_table(sig), classify_recursive(sig)
    if a != b:
        raise AssertionError(f"classification paths disagree at {sig}: {a} vs {b}")
    return a


def even_classify(sig: Signature) -> AlgebraType:
    """C⁰(p+1,q) = C(q,p), and C⁰(p,q) ≅ C⁰(q,p)."""
    p, q = sig.p, sig.q
    if p == q == 0:
        out = AlgebraType("R", 1)
    elif p >= 1:
        out = classify(Signature(q, p - 1))
    else:
        out = classify(Signature(0, q - 1))
    if sig.n:
        check = _sized(EVEN_TABLE[(p - q) % 8], sig.n - 1)
        if check != out:
            raise AssertionError(f"even classification paths disagree at {sig}: {out} vs {check}")
    return out


def pseudoscalar_square(sig: Signature) -> int:
    full = (1 << sig.n) - 1
    s, _ = blade_product(full, full, sig)
    return s


def central_idempotent_count(sig: Signature) -> int:
    """2 when the centre splits as R⊕R (odd n with ω² = +1), else 1."""
    return 2 if sig.n % 2 and pseudoscalar_square(sig) == 1 else 1


SPINOR_TYPES = ("Dirac", "Weyl", "Majorana", "MajoranaWeyl")


def spinor_types(sig: Signature) -> set:
    s = (sig.p - sig.q) % 8
    out = {"Dirac"}
    if s % 2 == 0:
        out.add("Weyl")
    if s in (0, 1, 2):
        out.add("Majorana")
    if s == 0:
        out.add("MajoranaWeyl")
    return out


# ---------------------------------------------------------------- matrices

def mat(rows) -> list:
    return [[QI.coerce(x) if not isinstance(x, QI) else x for x in r] for r in rows]


def matmul(a, b) -> list:
    n, k, m = len(a), len(b), len(b[0])
    return [[sum((a[i][t] * b[t][j] for t in range(k)), QI(0)) for j in range(m)] for i in range(n)]


def matadd(a, b) -> list:
    return [[x + y for x, y in zip(r, s)] for r, s in zip(a, b)]


def matscale(k, a) -> list:
    return [[k * x for x in r] for r in a]


def identity(n: int) -> list:
    return [[QI(int(i == j)) for j in range(n)] for i in range(n)]


def mat_conj(a) -> list:
    return [[x.conjugate() for x in r] for r in a]


def dagger(a) -> list:
    return [[a[j][i].conjugate() for j in range(len(a))] for i in range(len(a[0]))]


def block(a, b, c, d) -> list:
    return [ra + rb for ra, rb in zip(a, b)] + [rc + rd for rc, rd in zip(c, d)]


ZERO2 = mat([[0, 0], [0, 0]])
I2 = identity(2)
PAULI = (
    mat([[0, 1], [1, 0]]),
    [[QI(0), QI(0, -1)], [QI(0, 1), QI(0)]],
    mat([[1, 0], [0, -1]]),
)
MINKOWSKI = (1, -1, -1, -1)


@dataclass
class GammaRep:
    gammas: tuple
    gamma5: list

    def anticommutator(self, mu: int, nu: int) -> list:
        g = self.gammas
        return matadd(matmul(g[mu], g[nu]), matmul(g[nu], g[mu]))

    def check(self) -> bool:
        I4 = identity(4)
        for mu in range(4):
            for nu in range(4):
                want = matscale(QI(2 * MINKOWSKI[mu]) if mu == nu else QI(0), I4)
                if self.anticommutator(mu, nu) != want:
                    return False
        prod = matmul(matmul(self.gammas[0], self.gammas[1]), matmul(self.gammas[2], self.gammas[3]))
        return prod == self.gamma5

    def products(self) -> dict:
        """γ^{μ₁}⋯γ^{μ_k} for every increasing index set, keyed by bitmask."""
        out = {}
        for m in range(16):
            acc = identity(4)
            for mu in range(4):
                if m >> mu & 1:
                    acc = matmul(acc, self.gammas[mu])
            out[m] = acc
        return out

    def span_dimension(self) -> int:
        vecs = [[x for r in M for x in r] for M in self.products().values()]
        return rank([list(v) for v in vecs], 16)

    def grade_dimensions(self) -> tuple:
        prods = self.products()
        dims = []
        for k in range(5):
            vecs = [[x for r in M for x in r] for m, M in prods.items() if grade(m) == k]
            dims.append(rank(vecs, 16))
        return tuple(dims)


def gamma_rep() -> GammaRep:
    """Dirac basis: γ⁰ = diag(I, −I), γ^k = [[0, σ^k], [−σ^k, 0]]."""
    g0 = block(I2, ZERO2, ZERO2, matscale(QI(-1), I2))
    gs = [g0] + [block(ZERO2, s, matscale(QI(-1), s), ZERO2) for s in PAULI]
    g5 = matmul(matmul(gs[0], gs[1]), matmul(gs[2], gs[3]))
    return GammaRep(tuple(gs), g5)


def slash(v, rep: GammaRep | None = None):
    """Σ_μ γ^μ v_μ as a sympy matrix."""
    import sympy

    rep = rep or gamma_rep()

    def to_sym(M):
        return sympy.Matrix([[sympy.Rational(x.re.numerator, x.re.denominator)
                              + sympy.I * sympy.Rational(x.im.numerator, x.im.denominator) for x in r] for r in M])

    return sum((to_sym(rep.gammas[mu]) * sympy.sympify(v[mu]) for mu in range(4)), sympy.zeros(4, 4))


def minkowski_product(v, w):
    return sum(MINKOWSKI[mu] * v[mu] * w[mu] for mu in range(4))


# ---------------------------------------------------------------------- CPT

@dataclass
class Operator:
    """ψ ↦ M ψ, or ψ ↦ M ψ* when ``antilinear``."""

    matrix: list
    antilinear: bool

    def then(self, other: "Operator") -> "Operator":
        """Apply ``self`` first, then ``other``."""
        inner = mat_conj(self.matrix) if other.antilinear else self.matrix
        return Operator(matmul(other.matrix, inner), self.antilinear != other.antilinear)

    def apply(self, psi) -> list:
        col = [[x] for x in psi]
        if self.antilinear:
            col = mat_conj(col)
        return [r[0] for r in matmul(self.matrix, col)]


def scalar_multiple_of_identity(M):
    """k if M = k·I, else None."""
    k = M[0][0]
    return k if M == matscale(k, identity(len(M))) else None


def cpt_matrices(rep: GammaRep | None = None) -> dict:
    rep = rep or gamma_rep()
    g = rep.gammas
    P = Operator(g[0], False)
    C = Operator(matscale(QI(0, -1), g[2]), True)
    T = Operator(matscale(QI(-1), matmul(g[1], g[3])), True)
    out = {}
    gamma0 = g[0]
    for name, op in (("P", P), ("C", C), ("T", T)):
        sq = op.then(op)
        # ψ̄ψ = ψ†γ⁰ψ; with commuting components, invariance means M†γ⁰M = γ⁰ (up to conjugation)
        pulled = matmul(dagger(op.matrix), matmul(gamma0, op.matrix))
        target = mat_conj(gamma0) if op.antilinear else gamma0
        factor = None
        for k in (QI(1), QI(-1)):
            if pulled == matscale(k, target):
                factor = k
        out[name] = {
            "matrix": op.matrix,
            "antilinear": op.antilinear,
            "square": scalar_multiple_of_identity(sq.matrix),
            "square_antilinear": sq.antilinear,
            "scalar_bilinear_factor": factor,
        }
    return out
