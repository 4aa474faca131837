import numpy as np
import pytest

from isl_lab.distributions import Gaussian2D
from isl_lab.rng import make_rng
from isl_lab.slicing import (ProjectionSet, make_slice_estimators, project,
                             sliced_bound_check, sliced_density_estimate,
                             sliced_discrepancy)


def test_projection_set_unit_and_deterministic():
    a = ProjectionSet.sample(2, 16, 5)
    b = ProjectionSet.sample(2, 16, 5)
    np.testing.assert_array_equal(a.directions, b.directions)
    np.testing.assert_allclose(np.linalg.norm(a.directions, axis=1), 1.0, atol=1e-12)
    assert a.directions.shape == (16, 2)


def test_projection_set_validation():
    with pytest.raises(ValueError):
        ProjectionSet(np.array([[2.0, 0.0]]), 0)
    with pytest.raises(ValueError):
        ProjectionSet.sample(0, 4, 0)
    with pytest.raises(ValueError):
        ProjectionSet(np.ones(3), 0)


def test_project_oracle():
    x = np.array([[1.0, 2.0], [3.0, -1.0]])
    s = np.array([0.6, 0.8])
    np.testing.assert_allclose(project(x, s), x @ s)
    with pytest.raises(ValueError):
        project(x, np.ones(3))


def test_sliced_discrepancy_small_for_same_law():
    rng = make_rng(0, 0)
    a = rng.normal(size=(20_000, 2))
    b = rng.normal(size=(20_000, 2))
    same = sliced_discrepancy(a, b, 5, 8, seed=1)
    far = sliced_discrepancy(a, b + 3.0, 5, 8, seed=1)
    assert 0.0 <= same < 0.01 < far


def test_sliced_density_estimate_averages():
    dirs = np.array([[1.0, 0.0], [0.0, 1.0]])
    ests = [lambda x: 2.0, lambda x: 4.0]
    assert sliced_density_estimate(np.array([0.3, 0.7]), ests, dirs) == 3.0
    with pytest.raises(ValueError):
        sliced_density_estimate(np.zeros(2), ests[:1], dirs)


def test_make_slice_estimators_positive_density():
    from isl_lab.bernstein import expected_pmf
    g = Gaussian2D()
    real = g.sample(20_000, make_rng(1, 1))
    ref = g.sample(20_000, make_rng(2, 1))
    pset = ProjectionSet.sample(2, 4, 3)
    pmfs = [expected_pmf(project(real, s), project(ref, s), 5)
            for s in pset.directions]
    ests = make_slice_estimators(pmfs, ref, pset.directions, 0.1)
    v = sliced_density_estimate(np.zeros(2), ests, pset.directions)
    # each slice sees a standard normal: density at 0 near 0.399
    assert v == pytest.approx(0.399, abs=0.08)


def test_sliced_bound_holds():
    for k in (2, 5):
        lhs, rhs = sliced_bound_check(Gaussian2D((0.3, -0.2)), Gaussian2D(), k, 8)
        assert lhs <= rhs
