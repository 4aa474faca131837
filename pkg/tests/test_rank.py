import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import betainc

from isl_lab.distributions import Mixture, Normal, Uniform
from isl_lab.rank import (RankPmf, discrepancy, empirical_pmf, exact_pmf,
                          histogram_pmf, rank_statistic)
from isl_lab.rng import make_rng


def test_rank_statistic_counts_ties():
    assert rank_statistic(1.0, np.array([0.0, 1.0, 2.0])) == 2
    assert rank_statistic(-5.0, np.array([0.0, 1.0])) == 0
    assert rank_statistic(5.0, np.array([0.0, 1.0])) == 2


def test_rankpmf_validation():
    with pytest.raises(ValueError):
        RankPmf(2, np.array([0.5, 0.5]))  # wrong length
    with pytest.raises(ValueError):
        RankPmf(1, np.array([0.9, 0.2]))  # sum != 1
    with pytest.raises(ValueError):
        RankPmf(1, np.array([1.2, -0.2]))  # negative
    u = RankPmf.uniform(4)
    assert u.probs.sum() == pytest.approx(1.0)


def test_histogram_pmf():
    pmf = histogram_pmf(np.array([0, 0, 1, 2, 2, 2]), 2)
    np.testing.assert_allclose(pmf.probs, [2 / 6, 1 / 6, 3 / 6])
    with pytest.raises(ValueError):
        histogram_pmf(np.array([3]), 2)


def test_discrepancy_values():
    assert discrepancy(RankPmf.uniform(9)) == 0.0
    # all mass on one bin: |1 - 1/(K+1)| + K/(K+1), scaled by 1/(K+1)
    k = 4
    pmf = RankPmf(k, np.eye(k + 1)[0])
    expect = (abs(1 - 1 / (k + 1)) + k / (k + 1)) / (k + 1)
    assert discrepancy(pmf) == pytest.approx(expect)


@given(st.integers(1, 12))
@settings(max_examples=20, deadline=None)
def test_discrepancy_nonnegative_and_bounded(k):
    rng = np.random.default_rng(k)
    p = rng.random(k + 1)
    pmf = RankPmf(k, p / p.sum())
    d = discrepancy(pmf)
    assert 0.0 <= d <= 2.0 / (k + 1)


def test_empirical_pmf_deterministic():
    rng1, rng2 = make_rng(3, 4), make_rng(3, 4)
    a = make_rng(0, 1).normal(size=2000)
    b = make_rng(0, 2).normal(size=2000)
    p1 = empirical_pmf(a, b, 5, rng1)
    p2 = empirical_pmf(a, b, 5, rng2)
    np.testing.assert_array_equal(p1.probs, p2.probs)


def test_empirical_pmf_uniform_same_law():
    a = make_rng(0, 1).normal(size=100_000)
    b = make_rng(0, 2).normal(size=100_000)
    pmf = empirical_pmf(a, b, 10, make_rng(0, 3))
    assert np.max(np.abs(pmf.probs - 1 / 11)) < 0.01


def test_empirical_pmf_validation():
    with pytest.raises(ValueError):
        empirical_pmf(np.ones(10), np.ones(3), 5, make_rng(0, 0))
    with pytest.raises(ValueError):
        empirical_pmf(np.empty(0), np.ones(10), 2, make_rng(0, 0))


def test_exact_pmf_identity_is_uniform():
    for k in (1, 5, 10):
        pmf = exact_pmf(Normal(0, 1), Normal(0, 1), k)
        assert discrepancy(pmf) < 1e-8


def test_exact_pmf_uniform_pair_oracle():
    # p = U(0,1), ptilde = U(0,2): Q(n) = 2 * int_0^(1/2) b_n(t) dt,
    # an incomplete beta integral.
    k = 6
    pmf = exact_pmf(Uniform(0, 1), Uniform(0, 2), k)
    for n in range(k + 1):
        expect = 2.0 / (k + 1) * betainc(n + 1, k - n + 1, 0.5)
        assert pmf.probs[n] == pytest.approx(expect, abs=1e-9)


def test_exact_pmf_two_routes_agree():
    # ptilde's tails dominate p's, so the t-route converges too
    pairs = [
        (Normal(0, 1), Normal(0, 2)),
        (Normal(0.5, 1), Normal(0, 1.5)),
        (Mixture((0.5, 0.5), (Normal(-1, 1), Normal(1, 1))), Normal(0, 3)),
    ]
    for p, pt in pairs:
        a = exact_pmf(p, pt, 7, method="y")
        b = exact_pmf(p, pt, 7, method="t")
        assert np.max(np.abs(a.probs - b.probs)) < 1e-7


def test_exact_pmf_heavy_tail_target():
    # y-route handles p heavier-tailed than ptilde
    from isl_lab.distributions import Cauchy
    pmf = exact_pmf(Cauchy(0, 1), Normal(0, 1), 5)
    assert pmf.probs.sum() == pytest.approx(1.0, abs=1e-8)
    # heavy tails push mass to the extreme ranks
    assert pmf.probs[0] > 1 / 6 and pmf.probs[-1] > 1 / 6


def test_exact_pmf_rejects_unknown_method():
    with pytest.raises(ValueError):
        exact_pmf(Normal(0, 1), Normal(0, 1), 3, method="z")
