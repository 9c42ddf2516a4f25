"""Bootstrap baseline: resample, re-run the leveraged fit, take coordinate-wise spread."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._rng import child_rng
from .data_model import Dataset
from .errors import BootstrapFailure, SingularSampleError
from .inference import BOOTSTRAP, Interval, TestResult, z_crit
from .leverage import SamplingPlan
from .sampling import solve_scaled


@dataclass(frozen=True)
class BootstrapConfig:
    B: int = 100
    r: int = 100
    seed: int | None = None

    def __post_init__(self):
        if self.B < 2:
            raise ValueError(f"B must be at least 2, got {self.B}")
        if self.r < 1:
            raise ValueError(f"r must be positive, got {self.r}")


def _one_replicate(X, Y, pi, r, rng):
    N = X.shape[0]
    idx = rng.integers(0, N, size=N)
    pi_b = pi[idx]
    pi_b = pi_b / pi_b.sum()
    accept, alias = _kernels.alias_build(pi_b)
    pos = _kernels.alias_draw(accept, alias, rng.integers(0, N, size=r), rng.random(r))
    rows = idx[pos]
    scale = 1.0 / np.sqrt(r * pi_b[pos])
    beta, _ = solve_scaled(X[rows], Y[rows], scale)
    return beta


def bootstrap_replicates(dataset: Dataset, plan: SamplingPlan, config: BootstrapConfig):
    """Return ``(estimates, redraws)``: a ``B x p`` array and the singular-redraw count.

    Replicate ``b`` uses the stream ``(seed, b, attempt)``, so results do not
    depend on evaluation order.
    """
    X, Y = dataset.X, dataset.Y
    out = np.empty((config.B, X.shape[1]))
    redraws = 0
    for b in range(config.B):
        attempt = 0
        while True:
            try:
                out[b] = _one_replicate(X, Y, plan.pi, config.r, child_rng(config.seed, b, attempt))
                break
            except SingularSampleError:
                redraws += 1
                attempt += 1
                if redraws > 10 * config.B:
                    raise BootstrapFailure(
                        f"more than {10 * config.B} singular bootstrap subsamples; increase r") from None
    return out, redraws


def sd_from_replicates(estimates) -> np.ndarray:
    return np.std(np.asarray(estimates, dtype=np.float64), axis=0, ddof=1)


def bootstrap_sd(dataset: Dataset, plan: SamplingPlan, config: BootstrapConfig) -> np.ndarray:
    estimates, _ = bootstrap_replicates(dataset, plan, config)
    return sd_from_replicates(estimates)


def bootstrap_ci(beta_w, delta, alpha: float) -> list[Interval]:
    beta_w = np.asarray(beta_w, dtype=np.float64)
    delta = np.asarray(delta, dtype=np.float64)
    if beta_w.shape != delta.shape:
        raise ValueError("beta_w and delta must have the same length")
    z = z_crit(alpha)
    return [Interval(j, float(b), float(b - z * d), float(b + z * d), alpha, BOOTSTRAP)
            for j, (b, d) in enumerate(zip(beta_w, delta))]


def bootstrap_test(beta_w, delta, alpha: float) -> list[TestResult]:
    """Reject ``beta_j = 0`` when ``|beta_j| > z * delta_j`` (strict)."""
    beta_w = np.asarray(beta_w, dtype=np.float64)
    delta = np.asarray(delta, dtype=np.float64)
    if beta_w.shape != delta.shape:
        raise ValueError("beta_w and delta must have the same length")
    z = z_crit(alpha)
    return [TestResult(j, abs(float(b)) > z * float(d), z * float(d), abs(float(b)))
            for j, (b, d) in enumerate(zip(beta_w, delta))]


bootstrap_test.__test__ = False
