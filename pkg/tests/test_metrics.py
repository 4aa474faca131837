import numpy as np
import pytest
from scipy.stats import ks_2samp

from isl_lab.metrics import MetricReport, accdf_error, grid_kl, ks_distance
from isl_lab.rng import make_rng


def test_ks_matches_scipy():
    rng = make_rng(0, 0)
    for _ in range(5):
        a = rng.normal(size=rng.integers(50, 500))
        b = rng.normal(0.3, 1.2, size=rng.integers(50, 500))
        assert ks_distance(a, b) == pytest.approx(ks_2samp(a, b).statistic, abs=1e-12)


def test_ks_identical_is_zero():
    a = make_rng(1, 0).normal(size=100)
    assert ks_distance(a, a) == 0.0
    with pytest.raises(ValueError):
        ks_distance(a, np.empty(0))


def test_accdf_zero_for_identical():
    a = np.sort(make_rng(2, 0).normal(size=500))
    assert accdf_error(a, a) == 0.0


def test_accdf_shift_invariant_domain():
    # nonpositive samples get jointly shifted, so the result is finite
    a = np.sort(make_rng(3, 0).normal(size=100))
    b = np.sort(make_rng(3, 1).normal(size=100))
    v = accdf_error(a, b)
    assert np.isfinite(v) and v >= 0
    with pytest.raises(ValueError):
        accdf_error(a, b[:50])


def test_accdf_grows_with_tail_mismatch():
    rng = make_rng(4, 0)
    real = np.sort(rng.pareto(1.5, 2000) + 1)
    near = np.sort(rng.pareto(1.5, 2000) + 1)
    far = np.sort(rng.normal(2, 0.5, 2000))
    assert accdf_error(real, near) < accdf_error(real, far)


def test_grid_kl_small_for_same_law():
    # 50x50 bins need ~1e5 samples before the histogram noise floor is small
    rng = make_rng(5, 0)
    a = rng.normal(size=(100_000, 2))
    b = rng.normal(size=(100_000, 2))
    assert grid_kl(a, b) < 0.1


def test_grid_kl_detects_mismatch():
    rng = make_rng(6, 0)
    a = rng.normal(size=(5000, 2))
    b = rng.normal(3.0, 1.0, size=(5000, 2))
    assert grid_kl(a, b) > 1.0


def test_grid_kl_validation():
    a = np.zeros((100, 2))
    with pytest.raises(ValueError):
        grid_kl(a, a)  # degenerate box
    with pytest.raises(ValueError):
        grid_kl(np.random.default_rng(0).normal(size=(50, 2)),
                np.zeros((50, 2)), bins=1)


def test_metric_report():
    r = MetricReport("ksd", 0.25, (100, 100), 3)
    assert r.csv_row() == "ksd,3,0.25"
    with pytest.raises(ValueError):
        MetricReport("ksd", float("nan"), (1, 1), 0)
    with pytest.raises(ValueError):
        MetricReport("ksd", -0.1, (1, 1), 0)
