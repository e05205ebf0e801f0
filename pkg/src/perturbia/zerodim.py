"""Zero-dimensional φ⁴ theory: exact series by moments and by graph sums,
a quadrature oracle, optimal truncation and Borel resummation.

Everything is normalised as Z/√(2π), with action ½φ² + λφ⁴/4! − jφ.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict
from fractions import Fraction
from functools import lru_cache
from math import exp, factorial, pi, sqrt

import numpy as np
from scipy import integrate

from . import graphs
from .errors import DomainError, PoleOnRayError, ResourceError
from .graphs import SOURCE, double_factorial, loop_number, one_pi_decompose
from .series import FormalSeries

DEFAULT_CAPS = (4, 6, 3)


@lru_cache(maxsize=None)
def _classes(v4: int, v1: int, flt: str):
    return tuple(graphs.enumerate_graphs(v4, v1, flt))


def _graph_sum(caps, flt, weight) -> FormalSeries:
    A, B, C = caps
    out: dict = {}
    for v4 in range(A + 1):
        for v1 in range(B + 1):
            for g, aut in _classes(v4, v1, flt):
                for key, w in weight(g, v4, v1, aut):
                    if key[0] <= A and key[1] <= B and key[2] <= C:
                        out[key] = out.get(key, 0) + w
    return FormalSeries(out, caps)


def _sign(v4: int) -> int:
    return -1 if v4 % 2 else 1


def moment_coefficient(m: int, k2: int) -> Fraction:
    """λ^m j^{k2} coefficient of Z/√(2π) from Gaussian moments."""
    if k2 % 2:
        return Fraction(0)
    return Fraction(_sign(m) * double_factorial(4 * m + k2 - 1),
                    24 ** m * factorial(m) * factorial(k2))


def z_series(caps=DEFAULT_CAPS, method: str = "moments") -> FormalSeries:
    A, B, C = caps
    if method == "moments":
        return FormalSeries({(m, b, 0): moment_coefficient(m, b)
                             for m in range(A + 1) for b in range(B + 1)}, caps)
    if method == "graphs":
        return _graph_sum(caps, "all", lambda g, v4, v1, aut: [((v4, v1, 0), Fraction(_sign(v4), aut))])
    raise DomainError(f"unknown method {method!r}")


def w_series(caps=DEFAULT_CAPS, method: str = "graphs") -> FormalSeries:
    """log Z, either as the connected-graph sum or as the formal logarithm."""
    if method == "log":
        return z_series(caps, "moments").log()
    if method == "graphs":
        return _graph_sum(caps, "connected",
                          lambda g, v4, v1, aut: [((v4, v1, 0), Fraction(_sign(v4), aut))])
    raise DomainError(f"unknown method {method!r}")


def phi_cl_series(caps=DEFAULT_CAPS, variant: str = "full") -> FormalSeries:
    """dW/dj; ``tree`` keeps loop-free graphs, ``hbar`` grades by loop number."""
    A, B, C = caps
    if variant == "full":
        return w_series((A, B + 1, 0)).d_j().truncate((A, B, 0))
    flt = {"tree": "trees", "hbar": "connected"}.get(variant)
    if flt is None:
        raise DomainError(f"unknown variant {variant!r}")

    def weight(g, v4, v1, aut):
        if not v1:
            return []
        c = loop_number(g) if variant == "hbar" else 0
        return [((v4, v1 - 1, c), Fraction(_sign(v4) * v1, aut))]

    out = _graph_sum((A, B + 1, C if variant == "hbar" else 0), flt, weight)
    return out.truncate((A, B, C if variant == "hbar" else 0))


def effective_action_series(caps=DEFAULT_CAPS) -> FormalSeries:
    """Γ[φ] in the (λ, φ) slots: −φ²/2 plus the 1PI sum with legs as φ."""
    A, B, _ = caps
    caps = (A, B, 0)
    gamma = _graph_sum(caps, "one_pi", lambda g, v4, v1, aut: [((v4, v1, 0), Fraction(_sign(v4), aut))])
    if B >= 2:
        gamma = gamma + FormalSeries.monomial((0, 2, 0), Fraction(-1, 2), caps)
    return gamma


def legendre_residual(caps=DEFAULT_CAPS) -> FormalSeries:
    """Γ[φ_cl] − W + j·φ_cl as a series in (λ, j)."""
    A, B, _ = caps
    caps = (A, B, 0)
    phi = phi_cl_series(caps, "full")
    gamma = effective_action_series(caps).compose(phi)
    j = FormalSeries.monomial((0, 1, 0), 1, caps)
    return gamma - w_series(caps) + j * phi


def tree_form_check(max_internal: int = 4, max_sources: int = 6) -> list:
    """(v4, v1, code, defect) for every connected class; defect should be 0."""
    rows = []
    for v4 in range(max_internal + 1):
        for v1 in range(max_sources + 1):
            for g, _ in _classes(v4, v1, "connected"):
                rows.append((v4, v1, g.code, graphs.tree_form_defect(g)))
    return rows


# ------------------------------------------------------------------ numerics

_WINDOW = 2 * sqrt(2 * 16 * np.log(10))  # e^{-R²/2} < 1e-16, doubled


def quad_z(lam: float, j: float = 0.0) -> float:
    """∫ exp(−φ²/2 − λφ⁴/24 + jφ) dφ / √(2π) by adaptive quadrature."""
    if not lam > 0:
        raise DomainError("quad_z needs lambda > 0")

    def f(x):
        return exp(-0.5 * x * x - lam * x ** 4 / 24 + j * x)

    R = _WINDOW + 2 * abs(j)
    pts = sorted({-R, 0.0, j, R})
    total = 0.0
    for a, b in zip(pts, pts[1:]):
        if b > a:
            total += integrate.quad(f, a, b, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
    return total / sqrt(2 * pi)


def z_vacuum_coefficients(n: int) -> list:
    """Exact a_k, k < n, of Z/√(2π) at j = 0."""
    return [moment_coefficient(k, 0) for k in range(n)]


@dataclass
class TruncationReport:
    lam: float
    k_opt: int
    partial_sums: list
    quad_value: float
    min_error: float
    predicted_k: float = 0.0
    predicted_error: float = 0.0
    errors: list = field(default_factory=list)

    def to_json(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d


def truncation_report(lam: float, n_terms: int | None = None, max_terms: int = 200) -> TruncationReport:
    if not lam > 0:
        raise DomainError("truncation needs lambda > 0")
    predicted = 3 / (2 * lam)
    n = n_terms or int(2 * predicted) + 6
    if n > max_terms:
        raise ResourceError(f"{n} series terms requested, cap is {max_terms}")
    q = quad_z(lam)
    a = z_vacuum_coefficients(n)
    lam_q = Fraction(lam)
    partial, s, errors = [], Fraction(0), []
    for k in range(n):
        s += a[k] * lam_q ** k
        partial.append(float(s))
        errors.append(abs(float(s - Fraction(q))))
    k_opt = min(range(n), key=errors.__getitem__)
    return TruncationReport(lam, k_opt, partial, q, errors[k_opt], predicted, exp(-predicted), errors)


# ---------------------------------------------------------------- Borel sum

def pade(coeffs, L: int, M: int):
    """Exact [L/M] Padé approximant; returns numerator and denominator (q0 = 1)."""
    from .exact import solve_exact

    c = [Fraction(x) for x in coeffs]
    need = L + M + 1
    if len(c) < need:
        raise DomainError(f"[{L}/{M}] approximant needs {need} coefficients")

    def at(k):
        return c[k] if 0 <= k < len(c) else Fraction(0)

    # Σ_{s=1..M} q_s c_{k-s} = -c_k for k = L+1..L+M
    cols = [{k: at(k - s) for k in range(L + 1, L + M + 1) if at(k - s)} for s in range(1, M + 1)]
    target = {k: -at(k) for k in range(L + 1, L + M + 1) if at(k)}
    q = solve_exact(cols, target, Fraction(0)) if M else []
    if q is None:
        raise DomainError(f"[{L}/{M}] approximant is degenerate")
    q = [Fraction(1)] + list(q)
    p = [sum((q[s] * at(k - s) for s in range(min(k, M) + 1)), Fraction(0)) for k in range(L + 1)]
    return p, q


def _positive_real_roots(q):
    poly = [float(x) for x in reversed(q)]
    while poly and poly[0] == 0:
        poly.pop(0)
    if len(poly) < 2:
        return []
    roots = np.roots(poly)
    return sorted(float(r.real) for r in roots
                  if r.real > 0 and abs(r.imag) <= 1e-9 * max(1.0, abs(r)))


def borel_sum_coefficients(coeffs, lam: float) -> float:
    """Borel–Padé sum of Σ a_n λ^n."""
    if not lam > 0:
        raise DomainError("Borel sum needs lambda > 0")
    b = [Fraction(a) / factorial(n) for n, a in enumerate(coeffs)]
    n = len(b)
    L = (n - 1) // 2
    M = n - 1 - L
    p, q = pade(b, L, M)
    poles = _positive_real_roots(q)
    if poles:
        raise PoleOnRayError(f"approximant has a pole on the positive axis at t={poles[0]:.6g}", poles[0])
    pf = np.array([float(x) for x in reversed(p)])
    qf = np.array([float(x) for x in reversed(q)])

    def f(u):
        t = lam * u
        return exp(-u) * np.polyval(pf, t) / np.polyval(qf, t)

    return integrate.quad(f, 0, np.inf, epsabs=1e-14, epsrel=1e-13, limit=400)[0]


def borel_sum(n_terms: int, lam: float) -> float:
    if n_terms < 8:
        raise DomainError("borel_sum needs at least 8 terms")
    return borel_sum_coefficients(z_vacuum_coefficients(n_terms), lam)
