import json

import pytest
from hypothesis import given, settings, strategies as st

from qcong.convolution_engine import check_key1, check_key2
from qcong.laurent_x import (
    CycloXFraction,
    QLaurentFraction,
    QXFraction,
    XLaurent,
    check_congruence,
    divisible_by_cyclotomic,
    product_images_mod_cyclotomic,
)
from qcong.poly_q import QLaurentPoly, QPoly, q_integer, q_pochhammer_pure
from qcong.qseries_terms import (
    SpecError,
    TermSpec,
    alpha,
    alpha_factors,
    applicable_roots,
    modulus,
    rhs,
    rhs_factors,
    specialized_single_sum,
    term_table_json,
    truncated_sum,
    truncated_sum_explicit,
    verify_specialized_single_sum,
    verify_vanishing_at_root,
)

P = QPoly.from_str
X = XLaurent.monomial(1)
XINV = XLaurent.monomial(-1)


def _qmono(e):
    return QLaurentPoly.monomial(e)


def _as_laurent_fraction(product_sum, e):
    num, den = product_sum.image_at_x_power(e)
    return QLaurentFraction(num, den)


def test_alpha_at_zero_is_one():
    for spec in (TermSpec(1, 2, 7, s=3), TermSpec(5, 2, 7), TermSpec(4, 2, 5), TermSpec(3, 2, 5)):
        assert alpha(spec, 0) == QXFraction(1, 1)
        assert alpha_factors(spec, 0).to_fraction() == QXFraction(1, 1)


def test_family2_alpha_at_zero_is_weight():
    # weight [2sk + r] is [r] at k = 0
    spec = TermSpec(2, 2, 5, s=3, r=2)
    assert alpha(spec, 0) == QXFraction(q_integer(2), 1)
    assert alpha_factors(spec, 0).to_fraction() == QXFraction(q_integer(2), 1)


def test_theorem1_alpha_k1_s4():
    # -q^3 [9] (1 - xq)(1 - q/x)(1 - q) / ((1 - xq^4)(1 - q^4/x)(1 - q^4)); 1/x terms cleared by x
    num = (X * P("q") * -1 + 1) * (X - P("q")) * (q_integer(9) * P("q - 1") * QPoly.monomial(3))
    den = (X * P("q^4") * -1 + 1) * (X - P("q^4")) * P("1 - q^4")
    expected = QXFraction(num, den)
    spec = TermSpec(1, 2, 5, s=4)
    assert alpha(spec, 1) == expected
    assert alpha_factors(spec, 1).to_fraction() == expected


def test_family5_square_pochhammer_splits():
    for k in range(13):
        assert q_pochhammer_pure(1, 2, 2 * k) == q_pochhammer_pure(1, 4, k) * q_pochhammer_pure(3, 4, k)


@pytest.mark.parametrize(
    "spec, k",
    [(TermSpec(1, 3, 13, s=4), 3), (TermSpec(2, 3, 11, s=4, r=3), 2), (TermSpec(3, 2, 5), 2),
     (TermSpec(4, 2, 5), 2), (TermSpec(5, 2, 7), 3)],
)
def test_factored_and_explicit_alpha_agree(spec, k):
    assert alpha_factors(spec, k).to_fraction() == alpha(spec, k)


def test_rhs_examples():
    assert rhs(TermSpec(1, 2, 1, s=3)) == QXFraction(1, 1)
    r = _as_laurent_fraction(rhs_factors(TermSpec(5, 2, 7)), 0)
    assert r == QLaurentFraction(QLaurentPoly.from_qpoly(q_integer(7) ** 2) * _qmono(-6), QLaurentPoly([1]))
    ratio = q_pochhammer_pure(2, 4, 1) ** 3
    expected = QXFraction(q_integer(5) ** 3 * ratio, q_pochhammer_pure(4, 4, 1) ** 3 * QPoly.monomial(3))
    assert rhs(TermSpec(3, 3, 5)) == expected
    assert rhs_factors(TermSpec(3, 3, 5)).to_fraction() == expected


def test_family5_single_sum_carries_jacobi_sign():
    # the N = 1 value at x = q^{+-n} is (-3/n) q^{(1-n)/2} [n]
    for n, sign in ((5, -1), (7, 1), (11, -1), (13, 1)):
        value = specialized_single_sum(TermSpec(5, 2, n), 1)
        expected = QLaurentFraction(QLaurentPoly.from_qpoly(q_integer(n)) * _qmono((1 - n) // 2) * sign,
                                    QLaurentPoly([1]))
        assert value == expected


def test_modulus_examples():
    m = modulus(TermSpec(1, 2, 5, s=4))
    assert (m.cyclotomic_indices, m.x_points) == ((5,), (5, -5))
    m = modulus(TermSpec(4, 2, 5))
    assert (m.cyclotomic_indices, m.x_points) == ((5, 10), (10, -10))
    m = modulus(TermSpec(5, 3, 25))
    assert (m.cyclotomic_indices, m.x_points) == ((5, 25), ())


@pytest.mark.parametrize(
    "args",
    [dict(theorem=1, N=5, n=13, s=4), dict(theorem=1, N=2, n=7, s=4), dict(theorem=2, N=2, n=7, s=3, r=2),
     dict(theorem=2, N=2, n=9, s=4, r=1), dict(theorem=2, N=4, n=13, s=3, r=1),
     dict(theorem=3, N=5, n=5), dict(theorem=3, N=2, n=7), dict(theorem=5, N=2, n=9),
     dict(theorem=6, N=2, n=5), dict(theorem=3, N=2, n=5, s=2), dict(theorem=2, N=2, n=6, s=3, r=0)],
)
def test_invalid_specs_rejected(args):
    with pytest.raises(SpecError):
        TermSpec(**args)


def test_theorem2_inequality_is_reported():
    spec = TermSpec(2, 3, 11, s=4, r=3)
    assert spec.inequality_holds
    with pytest.raises(SpecError, match="fails"):
        TermSpec(2, 6, 11, s=4, r=3)


@pytest.mark.parametrize(
    "spec, d",
    [(TermSpec(5, 2, 5), 5), (TermSpec(1, 2, 5, s=4), 5), (TermSpec(1, 2, 13, s=4), 13),
     (TermSpec(2, 2, 5, s=3, r=2), 11), (TermSpec(3, 2, 5), 13)],
)
def test_vanishing_at_roots(spec, d):
    assert verify_vanishing_at_root(spec, d)


def test_vanishing_fails_away_from_applicable_roots():
    assert not verify_vanishing_at_root(TermSpec(5, 2, 5), 3)
    assert not verify_vanishing_at_root(TermSpec(5, 2, 5), 9)


def test_applicable_roots():
    assert applicable_roots(TermSpec(1, 2, 7, s=3), 13) == [7, 13]
    assert applicable_roots(TermSpec(5, 2, 5), 13) == [5, 7, 11, 13]
    assert applicable_roots(TermSpec(2, 2, 11, s=4, r=3), 13) == [3, 7, 11]


def test_specialized_single_sum_examples():
    value = specialized_single_sum(TermSpec(1, 2, 7, s=3), 1)
    assert value == QLaurentFraction(QLaurentPoly.from_qpoly(q_integer(7)) * _qmono(5), QLaurentPoly([1]))
    value = specialized_single_sum(TermSpec(3, 2, 5), -1)
    expected = QLaurentFraction(
        QLaurentPoly.from_qpoly(q_integer(5) * q_pochhammer_pure(2, 4, 1)) * _qmono(-1),
        QLaurentPoly.from_qpoly(q_pochhammer_pure(4, 4, 1)),
    )
    assert value == expected
    assert verify_specialized_single_sum(TermSpec(1, 2, 1, s=3), 1)
    assert verify_specialized_single_sum(TermSpec(1, 2, 1, s=3), -1)


def _images(spec, d, length):
    nums, den = product_images_mod_cyclotomic([alpha_factors(spec, k) for k in range(length)], d)
    return [CycloXFraction(v, den) for v in nums]


@pytest.mark.parametrize("spec, d", [(TermSpec(1, 2, 5, s=4), 5), (TermSpec(5, 2, 5), 5), (TermSpec(3, 2, 5), 5)])
def test_alpha_images_satisfy_multiplicativity(spec, d):
    assert check_key2(_images(spec, d, 3 * d), d)


def test_family1_images_satisfy_window_condition():
    # s = 4, d = 13: alpha vanishes at zeta for (d-1)/4 < k < d
    assert check_key1(_images(TermSpec(1, 4, 13, s=4), 13, 13), 13, 4)


def test_family5_images_miss_window_for_triple_sum_at_7():
    # nonzero beyond (d-1)/3: alpha(4), alpha(5) survive at zeta_7
    images = _images(TermSpec(5, 3, 7), 7, 7)
    assert [k for k, v in enumerate(images) if v == 0] == [2, 3, 6]
    assert not check_key1(images, 7, 3)


def test_truncated_sum_lazy_and_explicit_agree():
    spec = TermSpec(1, 3, 7, s=3)
    lazy, eager = truncated_sum(spec), truncated_sum_explicit(spec)
    m = modulus(spec)
    assert check_congruence(lazy, eager, m).passed
    assert check_congruence(lazy, rhs(spec), m).passed
    assert check_congruence(eager, rhs_factors(spec), m).passed


def test_family5_triple_sum_explicit_route_not_divisible_at_7():
    assert not divisible_by_cyclotomic(truncated_sum_explicit(TermSpec(5, 3, 7)), 7)
    assert divisible_by_cyclotomic(truncated_sum_explicit(TermSpec(5, 3, 5)), 5)


def test_term_table_json_is_deterministic():
    spec = TermSpec(3, 2, 5)
    a, b = term_table_json(spec, 3), term_table_json(spec, 3)
    assert a == b
    json.loads(a)


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([TermSpec(1, 2, 13, s=4), TermSpec(3, 2, 5), TermSpec(5, 2, 7)]), st.integers(0, 5),
       st.integers(-9, 9))
def test_alpha_substitution_commutes_with_expansion(spec, k, e):
    from qcong.laurent_x import CoprimalityError, substitute_x

    try:
        lazy = substitute_x(alpha_factors(spec, k), e)
    except CoprimalityError:
        with pytest.raises(CoprimalityError):
            substitute_x(alpha(spec, k), e)
        return
    assert lazy == substitute_x(alpha(spec, k), e)
