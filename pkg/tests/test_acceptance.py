"""Acceptance suite: one group of checks per criterion, all in exact arithmetic.

A one-line PASS/FAIL summary per criterion is printed at the end of the run.
"""

import random
from fractions import Fraction

import pytest

from qcong.convolution_engine import multi_convolve_fast, multi_convolve_naive, run_property_suite
from qcong.exact_arith import divisors, primes_between
from qcong.padic_verifier import corollary_family, gz_triple_residues_mod_p3, modes_agree, sweep
from qcong.poly_q import QPoly, cyclotomic, q_integer
from qcong.qseries_terms import (
    TermSpec,
    applicable_roots,
    verify_specialized_single_sum,
    verify_theorem,
    verify_vanishing_at_root,
)


def criterion(n):
    return pytest.mark.criterion(n)


def _assert_all_factors_pass(report):
    bad = [(f.kind, f.index_or_exp, f.verdict) for f in report.factors if f.verdict != "pass"]
    assert report.passed, f"{report.description}: failing factors {bad}"


# -- 1 ---------------------------------------------------------------------------------

FAMILY1 = [(3, 2, 7), (3, 3, 7), (4, 2, 5), (4, 3, 13), (4, 4, 13)]


@criterion(1)
@pytest.mark.parametrize("s, N, n", FAMILY1)
def test_c1_family1(s, N, n):
    _assert_all_factors_pass(verify_theorem(TermSpec(1, N, n, s=s)))


# -- 2 ---------------------------------------------------------------------------------

FAMILY2 = [
    (r, s, p, N)
    for (r, s), ps in (((2, 3), (5, 11)), ((3, 4), (7, 11)))
    for p in ps
    for N in (2, 3)
    if (p - r) * N <= (p - 1) * s
]


@criterion(2)
@pytest.mark.parametrize("r, s, p, N", FAMILY2)
def test_c2_family2(r, s, p, N):
    report = verify_theorem(TermSpec(2, N, p, s=s, r=r))
    assert "holds" in report.description
    _assert_all_factors_pass(report)


def test_c2_covers_all_eight_instances():
    assert len(FAMILY2) == 8


# -- 3 ---------------------------------------------------------------------------------


@criterion(3)
@pytest.mark.parametrize("n", [5, 13])
@pytest.mark.parametrize("N", [2, 3, 4])
def test_c3_family3(n, N):
    _assert_all_factors_pass(verify_theorem(TermSpec(3, N, n)))


# -- 4 ---------------------------------------------------------------------------------


@criterion(4)
@pytest.mark.parametrize("N", [2, 3, 4])
def test_c4_family4_n5(N):
    report = verify_theorem(TermSpec(4, N, 5))
    assert [f.index_or_exp for f in report.factors] == [5, 10, 10, -10]
    _assert_all_factors_pass(report)


@criterion(4)
@pytest.mark.slow
@pytest.mark.parametrize("N", [2, 3, 4])
def test_c4_family4_n13(N):
    _assert_all_factors_pass(verify_theorem(TermSpec(4, N, 13)))


# -- 5 ---------------------------------------------------------------------------------


@criterion(5)
@pytest.mark.parametrize("n", [5, 7, 25])
def test_c5_family5_double_sum(n):
    report = verify_theorem(TermSpec(5, 2, n))
    assert report.factors[-1].kind == "x_point"
    _assert_all_factors_pass(report)


@criterion(5)
@pytest.mark.parametrize("n", [5, 7, 25])
@pytest.mark.parametrize("N", [3, 4])
def test_c5_family5_triple_and_quadruple_sums(n, N):
    report = verify_theorem(TermSpec(5, N, n))
    assert [f.index_or_exp for f in report.factors] == [d for d in divisors(n) if d > 1]
    _assert_all_factors_pass(report)


# -- 6 ---------------------------------------------------------------------------------

VANISHING = [
    (TermSpec(1, 2, 7, s=3), ()),
    (TermSpec(1, 2, 5, s=4), ()),
    (TermSpec(2, 2, 5, s=3, r=2), ()),
    (TermSpec(2, 2, 7, s=4, r=3), ()),
    (TermSpec(3, 2, 5), ()),
    (TermSpec(4, 2, 5), (10,)),
    (TermSpec(5, 2, 5), ()),
]


@criterion(6)
@pytest.mark.parametrize("spec, extra", VANISHING, ids=lambda v: getattr(v, "label", str(v)))
def test_c6_vanishing_at_roots(spec, extra):
    roots = applicable_roots(spec, 13) + list(extra)
    assert roots
    failing = [d for d in roots if not verify_vanishing_at_root(spec, d)]
    assert not failing


SPECIALIZED = (
    [TermSpec(1, N, n, s=s) for s, N, n in FAMILY1]
    + [TermSpec(2, N, p, s=s, r=r) for r, s, p, N in FAMILY2]
    + [TermSpec(3, 2, n) for n in (5, 13)]
)


@criterion(6)
@pytest.mark.parametrize("spec", SPECIALIZED, ids=lambda s: s.label)
@pytest.mark.parametrize("sign", [1, -1])
def test_c6_specialized_single_sums(spec, sign):
    assert verify_specialized_single_sum(spec, sign)


# -- 7 ---------------------------------------------------------------------------------

SWEEPS = [("E2", 2), ("E2", 3), ("F2", 2), ("F2", 3), ("F2", 4), ("E2_23", 2), ("E2_23", 3),
          ("F2_34", 2), ("F2_34", 3), ("F2_34", 4), ("G2", 2), ("G2", 3), ("G2", 4),
          ("LW", 2), ("LW", 3), ("LW", 4)]


def _sweep_passes(fam, pmax):
    reports = sweep(fam, 5, pmax)
    checked = [r for r in reports if r.verdict != "not_applicable"]
    assert checked
    failing = [(r.p, r.lhs_residue, r.rhs_residue) for r in checked if not r.passed]
    assert not failing, f"{fam.id} N={fam.N}: {failing}"


@criterion(7)
@pytest.mark.parametrize("fid, N", SWEEPS)
def test_c7_sweep_mod_p3(fid, N):
    fam = corollary_family(fid, N)
    assert fam.exponent == 3
    _sweep_passes(fam, 100)


@criterion(7)
@pytest.mark.parametrize("N, exponent", [(2, 3), (3, 1), (4, 1)])
def test_c7_gz_sweeps(N, exponent):
    fam = corollary_family("GZ", N)
    assert fam.exponent == exponent
    _sweep_passes(fam, 50)


@criterion(7)
@pytest.mark.parametrize("fid, N", SWEEPS + [("GZ", 2), ("GZ", 3), ("GZ", 4)])
def test_c7_exact_mode_agrees(fid, N):
    fam = corollary_family(fid, N)
    for p in primes_between(5, 13):
        if fam.applies_to(p):
            assert modes_agree(fam, p)


# -- 8 ---------------------------------------------------------------------------------


@criterion(8)
def test_c8_conjecture_mod_p2():
    _sweep_passes(corollary_family("GZ_conjecture", 3), 100)


@criterion(8)
def test_c8_fails_mod_p3():
    residues = gz_triple_residues_mod_p3(5, 100)
    assert any(residues.values())


# -- 9 ---------------------------------------------------------------------------------


@criterion(9)
def test_c9_lemma_property_suite():
    result = run_property_suite(seed=0, trials=200)
    assert result["counts"] == {"a": 200, "b": 200, "c": 200}
    assert result["failures"] == []
    assert result["guard"] == {"key1_violated": True, "identity_fails": True}


# -- 10 --------------------------------------------------------------------------------


@criterion(10)
def test_c10_q_integer_factorization():
    for n in range(1, 61):
        prod = QPoly([1])
        for d in divisors(n)[1:]:
            prod = prod * cyclotomic(d)
        assert q_integer(n) == prod


@criterion(10)
def test_c10_q_squared_decomposition():
    for n in range(1, 26, 2):
        prod = QPoly([1])
        for d in divisors(n)[1:]:
            prod = prod * cyclotomic(d) * cyclotomic(2 * d)
        assert q_integer(n, 2) == prod


@criterion(10)
def test_c10_fast_vs_naive_convolution():
    rng = random.Random(2024)
    for _ in range(100):
        N, n = rng.randint(1, 4), rng.randint(1, 9)
        seqs = [[Fraction(rng.randint(-30, 30), rng.randint(1, 7)) for _ in range(n)] for _ in range(N)]
        assert multi_convolve_fast(seqs, n).values == multi_convolve_naive(seqs, n).values


@criterion(10)
def test_c10_dual_path_padic():
    for fid, N in SWEEPS + [("GZ", 2), ("GZ", 3), ("GZ", 4), ("GZ_conjecture", 3)]:
        fam = corollary_family(fid, N)
        for p in primes_between(5, 13):
            if fam.applies_to(p):
                assert modes_agree(fam, p)
