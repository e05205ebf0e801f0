from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import THEORY, polynomials
from perturbia.errors import ConfigurationError, NotASymmetry
from perturbia.exact import QI
from perturbia.field_algebra import (Metric, Theory, check_conserved, divergence, euler_lagrange,
                                     literal_variation, maxwell, noether_current, vary)
from perturbia.parser import parse_lagrangian


def kg(n=4, extra=""):
    th = Theory.build(n, real=["phi"])
    return th, parse_lagrangian("dd(phi,phi) + m^2*phi^2" + extra, th)


def test_wave_equation():
    th = Theory.build(2, real=["phi"])
    el = euler_lagrange(th, parse_lagrangian("d0(phi)^2 - d1(phi)^2", th))["phi"]
    assert el == th.f("phi", 1, 1).scale(2) - th.f("phi", 0, 0).scale(2)


def test_klein_gordon():
    th, L = kg()
    el = euler_lagrange(th, L)["phi"]
    # box phi = m^2 phi, carried with the overall factor 2
    assert el == (th.c("m", 2) * th.f("phi") - th.box(th.f("phi"))).scale(2)


def test_phi4():
    th, L = kg(extra=" + lambda*phi^4")
    el = euler_lagrange(th, L)["phi"]
    phi = th.f("phi")
    assert el == (th.c("m", 2) * phi + th.c("lambda") * phi ** 3 * th.num(2) - th.box(phi)).scale(2)


def test_complex_scalar():
    th = Theory.build(4, complex_=["phi"])
    L = parse_lagrangian("dd(conj(phi),phi) + m^2*conj(phi)*phi", th)
    el = euler_lagrange(th, L)
    for name in ("phi", "phi*"):
        other = th.f(th.conj(name))
        assert el[name] == th.c("m", 2) * other - th.box(other)


def test_u1_current():
    th = Theory.build(4, complex_=["phi"])
    L = parse_lagrangian("dd(conj(phi),phi) + m^2*conj(phi)*phi", th)
    gen = {"phi": th.f("phi").scale(QI(0, 1)), "phi*": th.f("phi*").scale(QI(0, -1))}
    J = noether_current(th, L, gen)
    g = th.metric
    for mu in range(4):
        want = (th.f("phi*") * th.f("phi", mu) - th.f("phi") * th.f("phi*", mu)).scale(g[mu])
        assert J[mu].scale(QI(0, 1)) == want  # dividing by -i
    cert = check_conserved(J, euler_lagrange(th, L))
    assert cert.status == "conserved" and cert.verify(euler_lagrange(th, L))


@pytest.mark.parametrize("nu", range(4))
def test_energy_momentum(nu):
    th, L = kg()
    n = th.dim
    K = [L if mu == nu else th.num(0) for mu in range(n)]
    T = noether_current(th, L, {"phi": th.f("phi", nu)}, K)
    for mu in range(n):
        want = (th.f("phi", nu) * th.f("phi", mu)).scale(2 * th.metric[mu])
        if mu == nu:
            want = want - L
        assert T[mu] == want
    el = euler_lagrange(th, L)
    cert = check_conserved(T, el)
    assert cert.conserved and cert.verify(el)


def test_translation_without_k_is_rejected():
    th, L = kg(2)
    with pytest.raises(NotASymmetry) as err:
        noether_current(th, L, {"phi": th.f("phi", 0)})
    assert err.value.residual


def test_non_conserved_current():
    th, L = kg(2)
    cert = check_conserved([th.f("phi"), th.num(0)], euler_lagrange(th, L))
    assert cert.status != "conserved"
    assert not cert.verify(euler_lagrange(th, L))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_maxwell(n):
    th, L, Fup = maxwell(n)
    el = euler_lagrange(th, L)
    for nu in range(n):
        dF = sum((Fup[mu][nu].d(mu) for mu in range(n)), th.num(0))
        assert el[f"A{nu}"] == dF - th.f(f"J{nu}")
        assert el[f"J{nu}"] == -th.f(f"A{nu}")


def test_metric_parse():
    assert Metric.parse("+---").signature == (1, -1, -1, -1)
    with pytest.raises(ConfigurationError):
        Theory.build(3, real=["phi"], metric=Metric.parse("+-"))


small = polynomials.filter(lambda p: len(p) <= 3)


@settings(max_examples=60, deadline=None)
@given(small)
def test_variation_reassembles(L):
    res = vary(THEORY, L)
    assert res.reassemble(THEORY) == literal_variation(THEORY, L)
    assert res.el_terms == euler_lagrange(THEORY, L)


@settings(max_examples=40, deadline=None)
@given(small, small, small)
def test_total_derivatives_have_no_equations(L, a, b):
    total = L + divergence([a, b, THEORY.num(0)])
    assert euler_lagrange(THEORY, total) == euler_lagrange(THEORY, L)


def test_scale_is_exact():
    th = Theory.build(1, real=["phi"])
    assert th.f("phi").scale(Fraction(1, 3)).scale(3) == th.f("phi")
