from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from qcong.exact_arith import divisors
from qcong.poly_q import (
    CycloProduct,
    QLaurentPoly,
    QPoly,
    cyclotomic,
    divrem,
    one_minus_q_power,
    q_integer,
    q_integer_factors,
    q_pochhammer_factors,
    q_pochhammer_pure,
)

P = QPoly.from_str
_q = sympy.symbols("q")


def _sympy_coeffs(expr) -> list[int]:
    return [int(c) for c in reversed(sympy.Poly(expr, _q).all_coeffs())]


@pytest.mark.parametrize(
    "n, base, expected",
    [(4, 1, "1 + q + q^2 + q^3"), (1, 1, "1"), (3, 2, "1 + q^2 + q^4")],
)
def test_q_integer_examples(n, base, expected):
    assert q_integer(n, base) == P(expected)


@pytest.mark.parametrize("n, expected", [(1, "q - 1"), (6, "q^2 - q + 1"), (12, "q^4 - q^2 + 1")])
def test_cyclotomic_examples(n, expected):
    assert cyclotomic(n) == P(expected)


@pytest.mark.parametrize("n", range(1, 61))
def test_cyclotomic_matches_sympy(n):
    assert list(cyclotomic(n).coeffs) == _sympy_coeffs(sympy.cyclotomic_poly(n, _q))


@pytest.mark.parametrize(
    "a, m, k, expected",
    [(1, 4, 0, "1"), (1, 2, 2, "1 - q - q^3 + q^4"), (2, 4, 1, "1 - q^2")],
)
def test_pochhammer_examples(a, m, k, expected):
    assert q_pochhammer_pure(a, m, k) == P(expected)


def test_divrem_examples():
    assert divrem(P("q^2 - 1"), P("q - 1")) == (P("q + 1"), QPoly())
    quot, rem = divrem(q_integer(6), cyclotomic(3))
    assert not rem and quot == cyclotomic(2) * cyclotomic(6)
    assert divrem(P("q + 1"), P("q^2")) == (QPoly(), P("q + 1"))
    with pytest.raises(ZeroDivisionError):
        divrem(P("q"), QPoly())


def test_rational_coefficients_survive():
    half = QPoly([Fraction(1, 2)])
    assert (P("1 + q") * half).coeffs == (Fraction(1, 2), Fraction(1, 2))
    quot, rem = divrem(P("q^2 + 1"), P("2q + 1"))
    assert quot * P("2q + 1") + rem == P("q^2 + 1")


def test_laurent_normalisation():
    f = QLaurentPoly.from_str("q^-2 + 3")
    assert f * QLaurentPoly.monomial(2) == QLaurentPoly.from_str("1 + 3q^2")
    assert QLaurentPoly.monomial(-1) * QLaurentPoly.monomial(1) == QLaurentPoly([1])


def test_multiplicity_and_cap():
    f = cyclotomic(5) ** 3 * P("q + 2")
    assert f.multiplicity(cyclotomic(5)) == 3
    assert f.multiplicity(cyclotomic(5), cap=2) == 2
    assert f.multiplicity(cyclotomic(7)) == 0


@pytest.mark.parametrize("n", range(1, 61))
def test_q_integer_is_product_of_cyclotomics(n):
    prod = QPoly([1])
    for d in divisors(n):
        if d > 1:
            prod = prod * cyclotomic(d)
    assert q_integer(n) == prod
    num, den = q_integer_factors(n).expand()
    assert num == QLaurentPoly.from_qpoly(prod) * den


@pytest.mark.parametrize("n", range(1, 26, 2))
def test_q_integer_in_q_squared(n):
    # [n]_{q^2} = prod over d | n, d > 1 of Phi_d(q) Phi_{2d}(q) for odd n
    prod = QPoly([1])
    for d in divisors(n):
        if d > 1:
            prod = prod * cyclotomic(d) * cyclotomic(2 * d)
    assert q_integer(n, 2) == prod


def _expand(cp: CycloProduct):
    num, den = cp.expand()
    return num, den


@pytest.mark.parametrize("a, m, k", [(1, 2, 5), (2, 2, 6), (3, 4, 4), (6, 6, 3), (1, 4, 7)])
def test_factored_pochhammer_agrees_with_expansion(a, m, k):
    num, den = q_pochhammer_factors(a, m, k).expand()
    assert num == QLaurentPoly.from_qpoly(q_pochhammer_pure(a, m, k)) * den


def test_one_minus_negative_power():
    num, den = one_minus_q_power(-3).expand()
    assert num == QLaurentPoly.from_str("1 - q^-3") * den


polys = st.lists(st.integers(-20, 20), max_size=8).map(QPoly)
nonzero_polys = polys.filter(bool)


@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a + b == b + a
    assert a - a == QPoly()


@given(polys, nonzero_polys)
def test_divrem_identity(a, b):
    quot, rem = divrem(a, b)
    assert quot * b + rem == a
    assert rem.degree < b.degree


@given(st.lists(st.integers(-3000, 3000), min_size=30, max_size=80),
       st.lists(st.integers(-3000, 3000), min_size=30, max_size=80))
@settings(max_examples=50)
def test_kronecker_product_matches_schoolbook(a, b):
    expected = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            expected[i + j] += x * y
    assert QPoly(a) * QPoly(b) == QPoly(expected)


@given(st.dictionaries(st.integers(1, 30), st.integers(-3, 3), max_size=5), st.integers(-5, 5))
def test_cyclo_product_group_laws(exps, qexp):
    x = CycloProduct(3, qexp, exps)
    assert x * x.inverse() == CycloProduct(1)
    assert (x**3) / x == x * x
