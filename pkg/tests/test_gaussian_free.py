import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perturbia.errors import DomainError, ResolutionError, ResourceError
from perturbia.gaussian_free import (QuadForm, bump, gauss_closed_form, green_function, perfect_matchings,
                                     propagator_1d, quad_gauss, sqrt_det_over_i, uniform_grid)


def random_form(rng, n):
    B = rng.normal(size=(n, n))
    im = B @ B.T + 0.5 * np.eye(n)
    re = rng.normal(size=(n, n))
    return QuadForm((re + re.T) / 2 + 1j * im)


def test_one_dimensional_fresnel_value():
    # ∫ e^{i a x²} dx = √(π/(−i a)) continued from a = i
    q = QuadForm([[1j]])
    assert gauss_closed_form(q) == pytest.approx(np.sqrt(np.pi))
    q = QuadForm([[0.5 + 2j]])
    assert gauss_closed_form(q) == pytest.approx(np.sqrt(np.pi / (-1j * (0.5 + 2j))))


@pytest.mark.parametrize("seed", range(6))
def test_closed_form_against_quadrature(seed):
    rng = np.random.default_rng(seed)
    n = 1 + seed % 2
    q = random_form(rng, n)
    j = rng.normal(size=n) + 0.3j * rng.normal(size=n)
    assert abs(gauss_closed_form(q, j) - quad_gauss(q, j)) < 1e-9


def test_branch_is_continuous_along_a_rotation():
    # A = e^{iθ} stays in the upper half plane for θ ∈ (0, π)
    prev = None
    for theta in np.linspace(0.05, np.pi - 0.05, 40):
        v = sqrt_det_over_i(QuadForm([[np.exp(1j * theta)]]))
        if prev is not None:
            assert abs(v - prev) < 0.1
        prev = v


def test_form_guards():
    with pytest.raises(DomainError):
        QuadForm([[1.0]])
    with pytest.raises(DomainError):
        QuadForm([[1j, 1], [0, 1j]])
    with pytest.raises(ResourceError):
        QuadForm(1j * np.eye(9))
    with pytest.raises(ResourceError):
        quad_gauss(QuadForm(1j * np.eye(3)))


def test_green_function_counts():
    assert [len(green_function(n)) for n in (2, 4, 6, 8)] == [1, 3, 15, 105]
    odd = green_function(5)
    assert len(odd) == 0 and odd.diagnostic
    assert green_function(4).to_text().count("Δ") == 6
    with pytest.raises(ResourceError):
        green_function(16)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 4))
def test_matchings_are_perfect_and_distinct(k):
    pts = list(range(2 * k))
    ms = list(perfect_matchings(pts))
    assert len(set(ms)) == len(ms)
    for m in ms:
        assert sorted(x for pair in m for x in pair) == pts


@pytest.mark.parametrize("m", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("center, width", [(0.0, 1.0), (0.4, 1.5), (-0.7, 0.9)])
def test_weak_equation(m, center, width):
    p = propagator_1d(m)
    x = uniform_grid(6.0, 8192)
    t = bump(center, width)
    scale = np.abs(t(x)).max()
    assert abs(p.weak_residual(x, t)) < 1e-6 * scale


def test_profile_matches_the_stated_constant():
    p = propagator_1d(2.0)
    assert p.profile(0.0) == pytest.approx(np.pi / 2.0)


def test_coarse_grids_are_refused():
    p = propagator_1d(1.0)
    with pytest.raises(ResolutionError):
        p.weak_residual(uniform_grid(4.0, 64), bump(0.0, 0.2))
    with pytest.raises(ResolutionError):
        p.weak_residual(uniform_grid(1.0, 1024), bump(0.0, 2.0))
    with pytest.raises(DomainError):
        p.weak_residual(np.linspace(-1, 1.3, 100), bump(0.0, 0.5))
    with pytest.raises(DomainError):
        propagator_1d(0.0)


def test_grid_contains_origin():
    x = uniform_grid(3.0, 1000)
    assert (len(x) - 1) % 8 == 0 and 0.0 in x


@pytest.mark.parametrize("width", [0.2, 0.3, 0.5])
def test_narrow_bump_at_origin(width):
    # narrow support needs a tighter window for the same point count
    p = propagator_1d(1.0)
    t = bump(0.0, width)
    assert abs(p.weak_residual(uniform_grid(1.0, 8192), t)) < 1e-6 * t(np.array([0.0]))[0]
