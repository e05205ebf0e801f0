"""Gaussian integrals, Wick pairings and the 1-d Euclidean propagator."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import pi, sqrt

import numpy as np

from .errors import DomainError, ResolutionError, ResourceError
from .graphs import double_factorial

MAX_DIM = 8
MAX_GREEN_POINTS = 14


@dataclass(frozen=True)
class QuadForm:
    """Symmetric complex matrix with positive definite imaginary part."""

    A: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=complex))
        object.__setattr__(self, "A", A)
        n = A.shape[0]
        if A.shape != (n, n):
            raise DomainError("quadratic form must be square")
        if n > MAX_DIM:
            raise ResourceError(f"dimension {n} exceeds {MAX_DIM}")
        if not np.allclose(A, A.T, atol=1e-13):
            raise DomainError("quadratic form must be symmetric")
        try:
            np.linalg.cholesky(A.imag)
        except np.linalg.LinAlgError:
            raise DomainError("imaginary part is not positive definite") from None

    @property
    def n(self) -> int:
        return self.A.shape[0]


def sqrt_det_over_i(q: QuadForm, steps: int = 64) -> complex:
    """√det(A/i), continued from the principal value at A = iI along the segment."""
    n = q.n
    prev = 1.0 + 0j
    for s in np.linspace(0.0, 1.0, steps + 1)[1:]:
        M = ((1 - s) * 1j * np.eye(n) + s * q.A) / 1j
        r = np.sqrt(complex(np.linalg.det(M)))
        prev = r if abs(r - prev) <= abs(r + prev) else -r
    return prev


def gauss_closed_form(q: QuadForm, j=None) -> complex:
    """∫ exp(i(x,Ax) + i(j,x)) dⁿx in closed form."""
    n = q.n
    j = np.zeros(n, dtype=complex) if j is None else np.atleast_1d(np.asarray(j, dtype=complex))
    quad = j @ np.linalg.solve(q.A, j)
    return np.exp(-1j * quad / 4) * sqrt(pi) ** n / sqrt_det_over_i(q)


def _gl_panels(lo, hi, panels, order=24):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    mid = (edges[1:] + edges[:-1]) / 2
    half = (edges[1:] - edges[:-1]) / 2
    return (mid[:, None] + half[:, None] * x).ravel(), (half[:, None] * w).ravel()


def quad_gauss(q: QuadForm, j=None) -> complex:
    """Direct numerical integration (n ≤ 2) with composite Gauss–Legendre."""
    n = q.n
    if n > 2:
        raise ResourceError("numerical Gaussian oracle supports n <= 2 only")
    j = np.zeros(n, dtype=complex) if j is None else np.atleast_1d(np.asarray(j, dtype=complex))
    B = q.A.imag
    mu = float(np.linalg.eigvalsh(B).min())
    # |integrand| = exp(-(x,Bx) - (Im j, x)), peaked at c
    c = -np.linalg.solve(B, j.imag) / 2
    R = sqrt(42.0 / mu) + 1.0
    freq = 2 * np.abs(q.A.real).sum() * (np.abs(c).max() + R) + np.abs(j.real).max() + 1.0
    # about 12 radians of phase per order-24 panel
    panels = int(np.ceil(2 * R * freq / 12)) + 8
    nodes, weights = [], []
    for k in range(n):
        x, w = _gl_panels(c[k] - R, c[k] + R, panels)
        nodes.append(x)
        weights.append(w)
    if n == 1:
        x = nodes[0]
        f = np.exp(1j * q.A[0, 0] * x * x + 1j * j[0] * x)
        return complex(np.sum(weights[0] * f))
    a = q.A
    y, wy = nodes[1], weights[1]
    row_y = a[1, 1] * y * y + j[1] * y
    total = 0j
    # row blocks keep memory bounded for strongly oscillating forms
    for start in range(0, len(nodes[0]), 256):
        x = nodes[0][start:start + 256, None]
        phase = a[0, 0] * x * x + 2 * a[0, 1] * x * y + row_y + j[0] * x
        total += np.sum(weights[0][start:start + 256, None] * wy * np.exp(1j * phase))
    return complex(total)


# -------------------------------------------------------------- Wick pairings

@dataclass
class PairingExpression:
    N: int
    terms: list
    diagnostic: str | None = None

    def __len__(self):
        return len(self.terms)

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join("".join(f"Δ(x{a}−x{b})" for a, b in m) for m in self.terms)

    def to_json(self) -> dict:
        return {"N": self.N, "terms": [[list(p) for p in m] for m in self.terms],
                "count": len(self.terms), "diagnostic": self.diagnostic}


def perfect_matchings(points):
    points = list(points)
    if not points:
        yield ()
        return
    a = points[0]
    for i in range(1, len(points)):
        rest = points[1:i] + points[i + 1:]
        for m in perfect_matchings(rest):
            yield ((a, points[i]),) + m


def green_function(N: int) -> PairingExpression:
    """Free-field G_N as the sum over pairings of Π Δ(x_a − x_b)."""
    if N < 0:
        raise DomainError("N must be nonnegative")
    if N > MAX_GREEN_POINTS:
        raise ResourceError(f"N={N} exceeds {MAX_GREEN_POINTS}")
    if N % 2:
        return PairingExpression(N, [], "odd number of points: G_N vanishes")
    terms = sorted(perfect_matchings(range(1, N + 1)))
    assert len(terms) == double_factorial(N - 1)
    return PairingExpression(N, terms)


# ------------------------------------------------------------- 1-d propagator

@dataclass
class Propagator1D:
    """f(x) = K_δ e^{−m|x|}/(2m), so (−d²/dx² + m²) f = K_δ δ."""

    m: float
    k_delta: float = 2 * pi
    tol: float = 1e-7
    history: list = field(default_factory=list)

    def __post_init__(self):
        if not self.m > 0:
            raise DomainError("mass must be positive")

    def profile(self, x):
        x = np.asarray(x, dtype=float)
        return self.k_delta * np.exp(-self.m * np.abs(x)) / (2 * self.m)

    def _residual_on(self, x, t):
        h = x[1] - x[0]
        # spectral second derivative; t vanishes at both ends so the grid is periodic
        k = 2 * pi * np.fft.rfftfreq(len(t), d=h)
        d2 = np.fft.irfft(-(k ** 2) * np.fft.rfft(t), n=len(t))
        g = self.profile(x) * (-d2 + self.m ** 2 * t)
        i0 = int(np.argmin(np.abs(x)))
        total = _simpson(g[: i0 + 1], h) + _simpson(g[i0:], h)
        return total - self.k_delta * t[i0]

    def weak_residual(self, x, t) -> float:
        """∫ f·(−t'' + m² t) dx − K_δ t(0) for t sampled on a uniform grid through 0."""
        x = np.asarray(x, dtype=float)
        t = np.asarray(t(x) if callable(t) else t, dtype=float)
        if x.ndim != 1 or x.shape != t.shape or len(x) < 9:
            raise DomainError("grid and samples must be matching 1-d arrays")
        h = x[1] - x[0]
        if not np.allclose(np.diff(x), h, rtol=1e-9, atol=0):
            raise DomainError("grid must be uniform")
        i0 = int(np.argmin(np.abs(x)))
        if abs(x[i0]) > 1e-9 * h:
            raise DomainError("grid must contain the origin")
        scale = max(float(np.max(np.abs(t))), 1e-300)
        if max(abs(t[0]), abs(t[-1]), abs(t[1]), abs(t[-2])) > 1e-12 * scale:
            raise ResolutionError("test function does not vanish at the grid ends")
        fine = self._residual_on(x, t)
        coarse = self._residual_on(x[::2], t[::2])
        self.history.append((fine, coarse))
        if abs(fine - coarse) > self.tol * scale:
            raise ResolutionError(
                f"residual unstable under grid halving ({fine:.3e} vs {coarse:.3e}); refine the grid")
        return float(fine)


def _simpson(y, h):
    n = len(y) - 1
    if n < 2:
        return 0.0
    if n % 2:
        # trailing interval by the 3/8 rule over its last three panels
        head = _simpson(y[:-3], h) if n > 3 else 0.0
        return head + 3 * h / 8 * (y[-4] + 3 * y[-3] + 3 * y[-2] + y[-1])
    return h / 3 * (y[0] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum() + y[-1])


def propagator_1d(m: float, k_delta: float = 2 * pi) -> Propagator1D:
    return Propagator1D(m, k_delta)


def bump(center: float = 0.0, width: float = 1.0, amplitude: float = 1.0):
    """Smooth compactly supported test function."""

    def t(x):
        x = np.asarray(x, dtype=float)
        u = (x - center) / width
        out = np.zeros_like(x)
        inside = np.abs(u) < 1
        out[inside] = amplitude * np.exp(-1 / (1 - u[inside] ** 2))
        return out

    return t


def uniform_grid(half_width: float, points: int) -> np.ndarray:
    """Symmetric grid through 0 whose halves stay even under one halving."""
    k = max(points // 8, 2)
    return np.linspace(-half_width, half_width, 8 * k + 1)
