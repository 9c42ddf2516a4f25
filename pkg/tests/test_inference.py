import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levinfer.data_model import Dataset
from levinfer.inference import (CSV_FIELDS, KNOWN_SIGMA, UNKNOWN_SIGMA, SandwichVariance,
                                asymptotic_variance_oracle, ci_known_sigma, ci_unknown_sigma,
                                estimate_sigma2, infer_all, sandwich_variance,
                                sandwich_variance_dense, test_significance, write_intervals_csv)
from levinfer.leverage import SamplingPlan, exact_leverage, make_plan, uniform_plan
from levinfer.sampling import (LevFit, draw_sample, full_enumeration_sample, ols_fit,
                               sample_from_draws, solve_weighted)

from oracles import dense_sandwich

Z_975 = 1.9599639845400538


def point_fit(*beta):
    """A fit carrying only the estimate; enough for interval construction."""
    b = np.array(beta, dtype=float)
    return LevFit(b, np.eye(len(b)), full_enumeration_sample(len(b)), np.eye(len(b)))


def test_sandwich_full_enumeration():
    ds = Dataset([[1.0], [2.0]], [1.0, 2.0])
    sw = sandwich_variance(solve_weighted(ds, full_enumeration_sample(2)))
    np.testing.assert_allclose(sw.matrix, [[0.2]], rtol=1e-14)


def test_sandwich_scalar_case():
    """One distinct row with c = 2: w^2 c^2 / (w c^2)^2 = 1/c^2 whatever the weight."""
    ds = Dataset([[2.0], [2.0]], [1.0, 1.0])
    plan = SamplingPlan([0.3, 0.7])
    for draws in ([0], [0, 0, 0], [1, 1], [1] * 7):
        fit = solve_weighted(ds, sample_from_draws(plan, draws))
        np.testing.assert_allclose(sandwich_variance(fit).matrix, [[0.25]], rtol=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 50), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_sandwich_matches_dense_oracle(N, p, seed):
    if N <= p:
        N = p + 1
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((N, p))
    ds = Dataset(X, rng.standard_normal(N))
    plan = make_plan(exact_leverage(X), 0.2)
    r = int(rng.integers(max(p, 2) * 3, 101))
    s = draw_sample(plan, r, rng)
    try:
        fit = solve_weighted(ds, s)
    except Exception:
        return
    ref = dense_sandwich(X, s.draws, plan.pi)
    np.testing.assert_allclose(sandwich_variance(fit).matrix, ref, rtol=1e-10, atol=1e-12 * np.abs(ref).max())
    np.testing.assert_allclose(sandwich_variance_dense(fit).matrix, ref, rtol=1e-10,
                               atol=1e-12 * np.abs(ref).max())


def test_sandwich_reduction_to_ols(rng):
    X = rng.standard_normal((40, 3))
    ds = Dataset(X, rng.standard_normal(40))
    fit = solve_weighted(ds, full_enumeration_sample(40))
    np.testing.assert_allclose(sandwich_variance(fit).matrix, np.linalg.inv(X.T @ X), rtol=1e-10)
    assert estimate_sigma2(ds, fit) == pytest.approx(ols_fit(ds).sigma2_hat, rel=1e-12)


def test_negative_diagonal_handling():
    assert SandwichVariance(np.array([[-1e-14, 0], [0, 1.0]])).diag_entry(0) == 0.0
    with pytest.raises(ArithmeticError):
        SandwichVariance(np.array([[-0.5, 0], [0, 1.0]])).diag_entry(0)


def test_sigma2_examples():
    ds = Dataset([[1.0], [2.0], [3.0]], [1.0, 2.0, 3.0])
    assert estimate_sigma2(ds, solve_weighted(ds, full_enumeration_sample(3))) < 1e-28
    ds = Dataset(np.ones((3, 1)), [0.0, 1.0, 2.0])
    fit = solve_weighted(ds, full_enumeration_sample(3))
    assert fit.beta[0] == pytest.approx(1.0, rel=1e-14)
    assert estimate_sigma2(ds, fit) == pytest.approx(1.0, rel=1e-14)
    # residuals (1, -1, 0) at beta = 1
    ds = Dataset([[1.0], [2.0], [3.0]], [2.0, 1.0, 3.0])
    assert estimate_sigma2(ds, point_fit(1.0)) == pytest.approx(1.0, rel=1e-14)


def test_known_sigma_examples():
    sw = SandwichVariance(np.array([[0.04]]))
    ci = ci_known_sigma(point_fit(1.0), sw, 1.0, 0.05, 0)
    assert ci.method == KNOWN_SIGMA
    assert ci.lo == pytest.approx(1 - 0.2 * Z_975, abs=1e-12)
    assert ci.hi == pytest.approx(1 + 0.2 * Z_975, abs=1e-12)
    assert (round(ci.lo, 4), round(ci.hi, 4)) == (0.6080, 1.3920)
    ci = ci_known_sigma(point_fit(1.0), sw, 1.0, 1.0, 0)
    assert ci.lo == ci.hi == 1.0
    ci = ci_known_sigma(point_fit(1.0), sw, 0.0, 0.05, 0)
    assert ci.lo == ci.hi == 1.0


def test_unknown_sigma_examples():
    sw = SandwichVariance(np.array([[1.0]]))
    ci = ci_unknown_sigma(point_fit(0.0), sw, 1.0, 0.5, 0, 1)
    assert ci.method == UNKNOWN_SIGMA
    assert ci.lo == pytest.approx(-1.0, abs=1e-14) and ci.hi == pytest.approx(1.0, abs=1e-14)
    sw = SandwichVariance(np.array([[0.37]]))
    for alpha in (0.01, 0.05, 0.3):
        t = ci_unknown_sigma(point_fit(2.0), sw, 4.0, alpha, 0, 10**6)
        z = ci_known_sigma(point_fit(2.0), sw, 2.0, alpha, 0)
        assert abs(t.half_width / z.half_width - 1) < 1e-3


@pytest.mark.parametrize("alpha", [0.0, -0.1, 1.5])
def test_invalid_alpha(alpha):
    sw = SandwichVariance(np.array([[1.0]]))
    with pytest.raises(ValueError):
        ci_known_sigma(point_fit(0.0), sw, 1.0, alpha, 0)
    with pytest.raises(ValueError):
        ci_unknown_sigma(point_fit(0.0), sw, 1.0, alpha, 0, 5)


def test_significance_examples():
    sw = SandwichVariance(np.array([[1.0]]))
    for alpha in (0.001, 0.05, 0.5, 0.99):
        assert not test_significance(point_fit(0.0), sw, 1.0, alpha, 0, 20).reject
    tr = test_significance(point_fit(5.0), sw, 1.0, 0.05, 0, 10**4)
    assert tr.reject
    assert tr.threshold == pytest.approx(1.96, abs=2e-3)
    assert tr.statistic == 5.0


@settings(max_examples=200, deadline=None)
@given(st.floats(-10, 10), st.floats(1e-4, 5), st.floats(1e-4, 5), st.floats(1e-3, 0.999),
       st.integers(1, 500))
def test_interval_test_duality(est, s2, v, alpha, dof):
    fit, sw = point_fit(est), SandwichVariance(np.array([[v]]))
    ci = ci_unknown_sigma(fit, sw, s2, alpha, 0, dof)
    tr = test_significance(fit, sw, s2, alpha, 0, dof)
    assert tr.reject == (tr.statistic >= tr.threshold)
    assert tr.reject == (not (ci.lo < 0 < ci.hi))
    assert ci.lo <= ci.hi
    assert abs((ci.hi - est) - (est - ci.lo)) <= 1e-12 * max(1.0, abs(est))


def test_width_monotone_in_alpha_and_sigma():
    sw = SandwichVariance(np.array([[0.3]]))
    alphas = np.linspace(0.01, 1.0, 50)
    widths = [ci_unknown_sigma(point_fit(1.0), sw, 2.0, a, 0, 12).half_width for a in alphas]
    assert all(a >= b for a, b in zip(widths, widths[1:]))
    widths = [ci_unknown_sigma(point_fit(1.0), sw, s2, 0.05, 0, 12).half_width for s2 in (0.0, 0.5, 1, 4)]
    assert widths == sorted(widths)


def test_infer_all_consistent_with_single_calls(rng):
    X = rng.standard_normal((80, 3))
    ds = Dataset(X, X @ [1.0, 0.0, -1.0] + rng.standard_normal(80))
    fit = solve_weighted(ds, draw_sample(make_plan(exact_leverage(X), 0.01), 40, seed=2))
    sw = sandwich_variance(fit)
    s2 = estimate_sigma2(ds, fit)
    intervals, tests = infer_all(ds, fit, 0.1)
    for j in range(3):
        ref = ci_unknown_sigma(fit, sw, s2, 0.1, j, 77)
        assert intervals[j] == ref
        assert tests[j] == test_significance(fit, sw, s2, 0.1, j, 77)
    intervals, _ = infer_all(ds, fit, 0.1, sigma=1.0)
    assert intervals[1] == ci_known_sigma(fit, sw, 1.0, 0.1, 1)


def test_csv_export():
    sw = SandwichVariance(np.array([[0.04]]))
    fit = point_fit(1.0)
    buf = io.StringIO()
    write_intervals_csv(buf, [ci_known_sigma(fit, sw, 1.0, 0.05, 0)],
                        [test_significance(fit, sw, 1.0, 0.05, 0, 30)])
    lines = buf.getvalue().splitlines()
    assert lines[0] == ",".join(CSV_FIELDS)
    assert lines[1].startswith("0,1.0,") and lines[1].endswith(",0.05,known-sigma,1")


def test_asymptotic_oracle_examples():
    plan = SamplingPlan([0.2, 0.8])
    X = [[1.0], [2.0]]
    for r in (1, 10, 1000):
        V = asymptotic_variance_oracle(X, plan, r, 1.0)
        assert V[0, 0] == pytest.approx(0.2 + 0.136 / r, rel=1e-13)
    V = asymptotic_variance_oracle(X, plan, 10**12, 1.0)
    assert V[0, 0] == pytest.approx(0.2, rel=1e-10)
    np.testing.assert_array_equal(asymptotic_variance_oracle(X, plan, 5, 0.0), np.zeros((1, 1)))


def test_known_sigma_exact_coverage_small():
    """Conditional on the sample the known-sigma interval is exact; a fast Monte Carlo check."""
    rng = np.random.default_rng(5)
    N, p, r, M = 200, 5, 50, 1500
    X = rng.standard_t(3, size=(N, p))
    beta = np.array([1.0, 0.0, -1.0, 0.5, 0.0])
    plan = make_plan(exact_leverage(X), 0.1)
    hits = np.zeros(p)
    for _ in range(M):
        Y = X @ beta + rng.standard_normal(N)
        fit = solve_weighted(Dataset(X, Y), draw_sample(plan, r, rng))
        sw = sandwich_variance(fit)
        hits += [ci_known_sigma(fit, sw, 1.0, 0.05, j).contains(beta[j]) for j in range(p)]
    cov = hits / M
    se = math.sqrt(0.05 * 0.95 / M)
    assert np.all(np.abs(cov - 0.95) < 4 * se), cov


def test_unknown_sigma_large_sample_coverage(reference_report):
    """Leveraging intervals at 95% cover at least 0.93 for r in {300, 500}."""
    for r in (300, 500):
        assert reference_report.row(r, 0.05, "leveraging-ci").coverage >= 0.93


def test_uniform_plan_full_enumeration_sigma(rng):
    X = rng.standard_normal((30, 2))
    ds = Dataset(X, rng.standard_normal(30))
    fit = solve_weighted(ds, sample_from_draws(uniform_plan(30), np.arange(30)))
    assert estimate_sigma2(ds, fit) == pytest.approx(ols_fit(ds).sigma2_hat, rel=1e-12)
