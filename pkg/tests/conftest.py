from fractions import Fraction

from hypothesis import strategies as st

from perturbia.exact import QI
from perturbia.field_algebra import FieldPolynomial, Theory

DIM = 3
THEORY = Theory.build(DIM, real=["phi", "chi"], complex_=["psi"])
NAMES = THEORY.field_names

fractions = st.builds(Fraction, st.integers(-12, 12), st.integers(1, 9))
gaussian = st.builds(QI, fractions, st.one_of(st.just(Fraction(0)), fractions))
words = st.tuples(*[st.integers(0, 2)] * DIM)
factors = st.tuples(st.sampled_from(NAMES), words)
params = st.dictionaries(st.sampled_from(["m", "lambda"]), st.integers(1, 3), max_size=2)


@st.composite
def monomial_keys(draw):
    facs = tuple(sorted(draw(st.lists(factors, max_size=4))))
    return facs, tuple(sorted(draw(params).items()))


polynomials = st.dictionaries(monomial_keys(), gaussian, max_size=6).map(
    lambda terms: FieldPolynomial(DIM, terms))


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
