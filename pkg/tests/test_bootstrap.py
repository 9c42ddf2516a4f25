import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levinfer.bootstrap import (BootstrapConfig, bootstrap_ci, bootstrap_replicates, bootstrap_sd,
                                bootstrap_test, sd_from_replicates)
from levinfer.data_model import Dataset
from levinfer.errors import BootstrapFailure
from levinfer.leverage import exact_leverage, make_plan, uniform_plan

Z_975 = 1.9599639845400538
Z_75 = 0.6744897501960817


@pytest.fixture
def problem(rng):
    X = rng.standard_normal((120, 3))
    ds = Dataset(X, X @ [1.0, 0.0, -2.0] + rng.standard_normal(120))
    return ds, make_plan(exact_leverage(X), 0.01)


def test_sd_examples():
    np.testing.assert_allclose(sd_from_replicates([[0.0], [2.0]]), [np.sqrt(2)], rtol=1e-15)
    np.testing.assert_array_equal(sd_from_replicates(np.tile([1.5, -2.0], (7, 1))), [0.0, 0.0])


def test_config_requires_two_replicates():
    with pytest.raises(ValueError):
        BootstrapConfig(B=1)


def test_bootstrap_sd_deterministic(problem):
    ds, plan = problem
    cfg = BootstrapConfig(B=20, r=40, seed=9)
    a, b = bootstrap_sd(ds, plan, cfg), bootstrap_sd(ds, plan, cfg)
    assert a.tobytes() == b.tobytes()
    assert a.shape == (3,) and np.all(a > 0)
    assert bootstrap_sd(ds, plan, BootstrapConfig(B=20, r=40, seed=10)).tobytes() != a.tobytes()


def test_replicates_independent_of_count(problem):
    """Replicate b has its own stream: the first 10 of 20 equal a run with B = 10."""
    ds, plan = problem
    est20, _ = bootstrap_replicates(ds, plan, BootstrapConfig(B=20, r=30, seed=1))
    est10, _ = bootstrap_replicates(ds, plan, BootstrapConfig(B=10, r=30, seed=1))
    np.testing.assert_array_equal(est20[:10], est10)


def test_replicate_order_invariance(problem):
    ds, plan = problem
    est, _ = bootstrap_replicates(ds, plan, BootstrapConfig(B=30, r=40, seed=4))
    perm = np.random.default_rng(0).permutation(30)
    np.testing.assert_allclose(sd_from_replicates(est[perm]), sd_from_replicates(est), rtol=1e-13)


def test_singular_redraws_counted_and_bounded():
    X = np.zeros((20, 2))
    X[:, 0] = 1.0
    X[0, 1] = 1.0  # only row 0 identifies the second coefficient
    ds = Dataset(X, np.arange(20.0))
    plan = uniform_plan(20)
    with pytest.raises(BootstrapFailure):
        bootstrap_replicates(ds, plan, BootstrapConfig(B=3, r=2, seed=0))


def test_ci_examples():
    ci = bootstrap_ci([1.0], [0.2], 0.05)[0]
    assert (round(ci.lo, 4), round(ci.hi, 4)) == (0.6080, 1.3920)
    assert ci.hi - 1.0 == pytest.approx(0.2 * Z_975, rel=1e-12)
    ci = bootstrap_ci([0.0, 3.0], [0.5, 2.0], 0.5)
    assert ci[1].half_width == pytest.approx(2.0 * Z_75, rel=1e-12)
    ci = bootstrap_ci([4.0], [0.0], 0.05)[0]
    assert ci.lo == ci.hi == 4.0
    assert ci.method == "bootstrap"
    with pytest.raises(ValueError):
        bootstrap_ci([1.0, 2.0], [1.0], 0.05)


def test_test_examples():
    assert not bootstrap_test([0.0], [1.0], 0.05)[0].reject
    assert bootstrap_test([3.0], [1.0], 0.05)[0].reject
    # strict inequality: a zero spread at zero estimate never rejects
    assert not bootstrap_test([0.0], [0.0], 0.05)[0].reject


@settings(max_examples=200, deadline=None)
@given(st.floats(-5, 5), st.floats(0, 3), st.floats(1e-3, 0.999))
def test_duality_with_interval(est, delta, alpha):
    ci = bootstrap_ci([est], [delta], alpha)[0]
    tr = bootstrap_test([est], [delta], alpha)[0]
    assert tr.reject == (not (ci.lo <= 0 <= ci.hi))


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 40), st.floats(-100, 100), st.integers(0, 2**32 - 1))
def test_shift_equivariance(B, c, seed):
    rng = np.random.default_rng(seed)
    reps = rng.standard_normal((B, 2))
    beta = rng.standard_normal(2)
    base = bootstrap_ci(beta, sd_from_replicates(reps), 0.1)
    shifted_reps = reps.copy()
    shifted_reps[:, 0] += c
    shifted_beta = beta.copy()
    shifted_beta[0] += c
    moved = bootstrap_ci(shifted_beta, sd_from_replicates(shifted_reps), 0.1)
    tol = 1e-12 * max(1.0, abs(c))
    assert abs(moved[0].lo - (base[0].lo + c)) < tol * 10
    assert abs(moved[0].hi - (base[0].hi + c)) < tol * 10
    assert moved[1] == base[1]
    assert np.all(sd_from_replicates(reps) >= 0)
