from fractions import Fraction as F

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from perturbia.clifford import (AlgebraType, CliffordElement, Signature, bilinear, center,
                                center_dimension_rule, central_idempotent_count, classify,
                                classify_recursive, classify_table, cpt_matrices, even_classify,
                                gamma_rep, identity, multiply, quadratic, reflect, slash, spinor_norm,
                                spinor_types)
from perturbia.errors import DomainError
from perturbia.exact import QI

BASE = {
    (0, 0): "R", (1, 0): "R⊕R", (0, 1): "C",
    (2, 0): "M2(R)", (1, 1): "M2(R)", (0, 2): "H",
}


@pytest.mark.parametrize("pq, label", BASE.items())
def test_base_cases(pq, label):
    assert str(classify(Signature(*pq))) == label


def test_spacetime_algebras():
    assert str(classify(Signature(3, 1))) == "M4(R)"
    assert str(classify(Signature(1, 3))) == "M2(H)"
    assert str(even_classify(Signature(1, 3))) == "M2(C)"


def test_table_and_recursion_agree():
    for p in range(13):
        for q in range(13):
            s = Signature(p, q)
            t = classify_table(s)
            assert classify_recursive(s) == t
            assert t.real_dimension == 2 ** s.n


def test_period_eight():
    for p in range(6):
        for q in range(6):
            a = classify(Signature(p, q))
            for b in (classify(Signature(p + 8, q)), classify(Signature(p, q + 8)),
                      classify(Signature(p + 4, q + 4))):
                assert b == AlgebraType(a.ring, 16 * a.matrix_size)


def test_centre_dimensions():
    for n in range(7):
        for p in range(n + 1):
            s = Signature(p, n - p)
            assert len(center(s)) == center_dimension_rule(n)
            assert len(center(s, even_only=True)) == center_dimension_rule(n, even_only=True)


def test_centre_splitting_matches_the_ring():
    for p in range(5):
        for q in range(5):
            s = Signature(p, q)
            split = "+" in classify(s).ring
            assert (central_idempotent_count(s) == 2) == split


def test_basic_products():
    s = Signature(2, 0)
    e1, e2 = (CliffordElement.generator(s, i) for i in range(2))
    e12 = e1 * e2
    assert e12 * e12 == CliffordElement.scalar(s, -1)
    assert e1 * e2 == -(e2 * e1)
    assert spinor_norm(e1) == -1
    assert spinor_norm(e12) == 1


vectors = st.lists(st.integers(-3, 3), min_size=3, max_size=3)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 3), vectors, vectors)
def test_vectors(p, a, b):
    s = Signature(p, 3 - p)
    x, y = CliffordElement.vector(s, a), CliffordElement.vector(s, b)
    want = sum(F(s.square(i)) * a[i] * b[i] for i in range(3))
    assert bilinear(x, y) == want
    # the spinor norm of a vector is -q(x); products multiply
    assert spinor_norm(x) == -quadratic(x)
    if quadratic(x) and quadratic(y):
        assert spinor_norm(x * y) == quadratic(x) * quadratic(y)
        r = reflect(x, y)
        assert quadratic(r) == quadratic(y)
        assert reflect(x, x) == -x


def test_isotropic_reflection_refused():
    s = Signature(1, 1)
    with pytest.raises(DomainError):
        reflect(CliffordElement.vector(s, [1, 1]), CliffordElement.vector(s, [1, 0]))


def test_spinor_types():
    assert spinor_types(Signature(1, 3)) == {"Dirac", "Weyl"}
    assert spinor_types(Signature(3, 1)) == {"Dirac", "Weyl", "Majorana"}
    assert spinor_types(Signature(1, 9)) == {"Dirac", "Weyl", "Majorana", "MajoranaWeyl"}
    assert spinor_types(Signature(2, 1)) == {"Dirac", "Majorana"}
    assert spinor_types(Signature(1, 2)) == {"Dirac"}
    assert spinor_types(Signature(0, 3)) == {"Dirac"}


def test_gamma_matrices():
    rep = gamma_rep()
    assert rep.check()
    assert rep.span_dimension() == 16
    assert rep.grade_dimensions() == (1, 4, 6, 4, 1)
    g5sq = [[sum((a * b for a, b in zip(r, c)), QI(0)) for c in zip(*rep.gamma5)] for r in rep.gamma5]
    assert g5sq == [[QI(-1) if i == j else QI(0) for j in range(4)] for i in range(4)]


def test_slash_squares_to_the_minkowski_norm():
    p = sympy.symbols("p0:4")
    S = slash(p)
    anti = sympy.expand(S * S)
    norm = p[0] ** 2 - p[1] ** 2 - p[2] ** 2 - p[3] ** 2
    assert sympy.simplify(anti - norm * sympy.eye(4)) == sympy.zeros(4, 4)


def test_discrete_symmetries():
    ops = cpt_matrices()
    assert ops["P"]["square"] == QI(1) and not ops["P"]["square_antilinear"]
    assert ops["C"]["square"] == QI(1) and not ops["C"]["square_antilinear"]
    assert ops["T"]["square"] == QI(-1) and not ops["T"]["square_antilinear"]
    assert not ops["P"]["antilinear"] and ops["C"]["antilinear"] and ops["T"]["antilinear"]
    # commuting-component bilinear factors, recorded rather than required
    assert {k: v["scalar_bilinear_factor"] for k, v in ops.items()} == {"P": QI(1), "C": QI(-1), "T": QI(1)}


def test_identity_helper():
    assert identity(2) == [[QI(1), QI(0)], [QI(0), QI(1)]]
