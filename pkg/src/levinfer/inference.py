"""Conditional variance, confidence intervals and significance tests for a leveraged fit."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .data_model import Dataset
from .leverage import SamplingPlan, exact_leverage
from .quantiles import normal_quantile, t_quantile
from .sampling import LevFit

KNOWN_SIGMA = "known-sigma"
UNKNOWN_SIGMA = "unknown-sigma"
BOOTSTRAP = "bootstrap"

_NEG_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SandwichVariance:
    """The sigma-free factor ``G (X^T W^2 X) G`` with ``G = (X^T W X)^{-1}``."""

    matrix: np.ndarray

    def diag_entry(self, j: int) -> float:
        v = float(self.matrix[j, j])
        if v < 0:
            scale = float(np.max(np.abs(np.diag(self.matrix)))) or 1.0
            if v < -_NEG_TOL * scale:
                raise ArithmeticError(f"sandwich variance entry ({j}, {j}) is negative: {v}")
            return 0.0
        return v


@dataclass(frozen=True)
class Interval:
    j: int
    estimate: float
    lo: float
    hi: float
    alpha: float
    method: str

    @property
    def half_width(self) -> float:
        return 0.5 * (self.hi - self.lo)

    def contains(self, value: float) -> bool:
        return self.lo <= value <= self.hi


@dataclass(frozen=True)
class TestResult:
    __test__ = False  # not a pytest class

    j: int
    reject: bool
    threshold: float
    statistic: float


def _check_alpha(alpha):
    # alpha = 1 is admitted: the quantile is then 0 and the interval collapses
    if not (0.0 < alpha <= 1.0):
        raise ValueError(f"alpha must lie in (0, 1], got {alpha!r}")


def z_crit(alpha: float) -> float:
    _check_alpha(alpha)
    return normal_quantile(1.0 - alpha / 2.0)


def t_crit(alpha: float, dof: int) -> float:
    _check_alpha(alpha)
    return t_quantile(1.0 - alpha / 2.0, dof)


def weighted_square_gram(fit: LevFit) -> np.ndarray:
    """``X^T W^2 X`` summed over distinct sampled rows: ``sum_j w_j^2 x_j x_j^T``."""
    s = fit.sample
    rows = np.ascontiguousarray(fit.sampled_rows[s.first])
    return _kernels.weighted_gram(rows, s.weights * s.weights)


def sandwich_variance(fit: LevFit) -> SandwichVariance:
    G = fit.gram_inv
    V = G @ weighted_square_gram(fit) @ G
    return SandwichVariance(0.5 * (V + V.T))


def sandwich_variance_dense(fit: LevFit) -> SandwichVariance:
    """Validation path: ``X^T W^2 X = (S^T X)^T D^2 (S^T S) D^2 (S^T X)``.

    ``S^T S`` is the r x r indicator of repeated draws.  O(r^2 p); kept for
    cross-checking :func:`sandwich_variance`.
    """
    draws = fit.sample.draws
    StS = (draws[:, None] == draws[None, :]).astype(np.float64)
    d2 = fit.sample.scale ** 2
    SX = fit.sampled_rows
    M = (SX * d2[:, None]).T @ StS @ (SX * d2[:, None])
    G = fit.gram_inv
    V = G @ M @ G
    return SandwichVariance(0.5 * (V + V.T))


def estimate_sigma2(dataset: Dataset, fit: LevFit) -> float:
    """Residual mean square of the leveraged fit over all N observations."""
    N, p = dataset.X.shape
    if N <= p:
        raise ValueError(f"N must exceed p (N={N}, p={p})")
    resid = dataset.Y - dataset.X @ fit.beta
    return float(resid @ resid) / (N - p)


def _interval(estimate, half, alpha, j, method):
    return Interval(j, estimate, estimate - half, estimate + half, alpha, method)


def _known_half(sandwich, sigma, alpha, j):
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    return z_crit(alpha) * sigma * math.sqrt(sandwich.diag_entry(j))


def _unknown_half(sandwich, sigma2_hat, alpha, j, dof):
    if sigma2_hat < 0:
        raise ValueError("sigma2_hat must be nonnegative")
    return t_crit(alpha, dof) * math.sqrt(sigma2_hat) * math.sqrt(sandwich.diag_entry(j))


def ci_known_sigma(fit: LevFit, sandwich: SandwichVariance, sigma: float, alpha: float, j: int) -> Interval:
    half = _known_half(sandwich, sigma, alpha, j)
    return _interval(float(fit.beta[j]), half, alpha, j, KNOWN_SIGMA)


def ci_unknown_sigma(fit: LevFit, sandwich: SandwichVariance, sigma2_hat: float, alpha: float,
                     j: int, dof: int) -> Interval:
    half = _unknown_half(sandwich, sigma2_hat, alpha, j, dof)
    return _interval(float(fit.beta[j]), half, alpha, j, UNKNOWN_SIGMA)


def test_significance(fit: LevFit, sandwich: SandwichVariance, sigma2_hat: float, alpha: float,
                      j: int, dof: int) -> TestResult:
    """Reject ``beta_j = 0`` when ``|beta_j| >= t * sigma_hat * sqrt(V_jj)``."""
    thr = _unknown_half(sandwich, sigma2_hat, alpha, j, dof)
    stat = abs(float(fit.beta[j]))
    return TestResult(j, stat >= thr, thr, stat)


test_significance.__test__ = False


def infer_all(dataset: Dataset, fit: LevFit, alpha: float, sigma: float | None = None):
    """Intervals and tests for every coefficient; unknown-sigma unless ``sigma`` is given."""
    sw = sandwich_variance(fit)
    N, p = dataset.X.shape
    s2 = estimate_sigma2(dataset, fit) if sigma is None else None
    intervals, tests = [], []
    for j in range(p):
        if sigma is None:
            half = _unknown_half(sw, s2, alpha, j, N - p)
            method = UNKNOWN_SIGMA
        else:
            half = _known_half(sw, sigma, alpha, j)
            method = KNOWN_SIGMA
        est = float(fit.beta[j])
        intervals.append(_interval(est, half, alpha, j, method))
        tests.append(TestResult(j, abs(est) >= half, half, abs(est)))
    return intervals, tests


def asymptotic_variance_oracle(X, plan: SamplingPlan, r: int, sigma2: float) -> np.ndarray:
    """Large-sample covariance of the leveraged estimator (validation use, O(N p^2)).

    ``sigma2 (X^T X)^{-1} + (sigma2 / r) G X^T diag((1 - h)^2 / pi) X G`` with
    ``G = (X^T X)^{-1}`` and ``h`` the exact leverage scores.
    """
    X = np.asarray(X, dtype=np.float64)
    h = exact_leverage(X).h
    R = np.linalg.qr(X, mode="r")
    R_inv = np.linalg.inv(R)
    G = R_inv @ R_inv.T
    d = (1.0 - h) ** 2 / plan.pi
    middle = (X * d[:, None]).T @ X
    V = sigma2 * G + (sigma2 / r) * (G @ middle @ G)
    return 0.5 * (V + V.T)


CSV_FIELDS = ("j", "estimate", "lo", "hi", "alpha", "method", "reject")


def interval_rows(intervals, tests):
    for ci, tr in zip(intervals, tests):
        yield {
            "j": ci.j, "estimate": repr(ci.estimate), "lo": repr(ci.lo), "hi": repr(ci.hi),
            "alpha": repr(ci.alpha), "method": ci.method, "reject": int(tr.reject),
        }


def write_intervals_csv(fh, intervals, tests):
    w = csv.DictWriter(fh, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for row in interval_rows(intervals, tests):
        w.writerow(row)
