"""Weighted subsampling and the reduced least-squares solve.

A subsample of ``r`` draws from ``pi`` is scaled row-wise by
``1 / sqrt(r * pi_i)`` and solved by QR.  The N x N weight matrix is never
formed; everything downstream works from the ``r`` sampled rows.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from . import _kernels
from .data_model import Dataset
from .errors import RankDeficientError, SingularSampleError
from .leverage import SamplingPlan


@dataclass(frozen=True, eq=False)
class WeightedSample:
    """Draws with replacement and their derived weights.

    ``draws`` keeps draw order (the columns of the selection matrix), ``scale``
    is the diagonal of the rescaling matrix, and ``indices``/``counts``/
    ``weights`` describe the distinct observations, with
    ``weights = counts / (r * pi[indices])``.
    """

    r: int
    draws: np.ndarray
    scale: np.ndarray
    indices: np.ndarray
    counts: np.ndarray
    weights: np.ndarray
    first: np.ndarray  # position in ``draws`` of each distinct index's first draw

    @property
    def distinct(self) -> dict[int, int]:
        return {int(j): int(c) for j, c in zip(self.indices, self.counts)}


@dataclass(frozen=True, eq=False)
class LevFit:
    beta: np.ndarray
    gram_inv: np.ndarray
    sample: WeightedSample
    sampled_rows: np.ndarray


@dataclass(frozen=True, eq=False)
class OLSFit:
    beta: np.ndarray
    gram_inv: np.ndarray
    sigma2_hat: float


def _make_sample(draws, pi_of_draws, pi_lookup) -> WeightedSample:
    r = draws.shape[0]
    indices, first, counts = np.unique(draws, return_index=True, return_counts=True)
    scale = 1.0 / np.sqrt(r * pi_of_draws)
    weights = counts / (r * pi_lookup(indices))
    return WeightedSample(r, draws, scale, indices, counts, weights, first)


def sample_from_draws(plan: SamplingPlan, draws) -> WeightedSample:
    """Build a :class:`WeightedSample` for an explicit sequence of draws."""
    draws = np.asarray(draws, dtype=np.int64)
    if draws.ndim != 1 or draws.size == 0:
        raise ValueError("draws must be a non-empty 1-d index array")
    if draws.min() < 0 or draws.max() >= plan.N:
        raise IndexError("draw index outside the plan")
    return _make_sample(draws, plan.pi[draws], lambda idx: plan.pi[idx])


def full_enumeration_sample(N: int) -> WeightedSample:
    """Every observation exactly once under uniform probabilities (all weights 1)."""
    draws = np.arange(N, dtype=np.int64)
    ones = np.ones(N)
    return WeightedSample(N, draws, ones.copy(), draws.copy(), np.ones(N, dtype=np.int64), ones, draws.copy())


def draw_indices(plan: SamplingPlan, r: int, rng) -> np.ndarray:
    accept, alias = plan.alias_table
    cols = rng.integers(0, plan.N, size=r)
    u = rng.random(r)
    return _kernels.alias_draw(accept, alias, cols, u)


def draw_sample(plan: SamplingPlan, r: int, seed=None) -> WeightedSample:
    """``r`` independent categorical draws from ``plan`` via its alias table."""
    if int(r) != r or r < 1:
        raise ValueError(f"r must be a positive integer, got {r!r}")
    rng = np.random.default_rng(seed)
    draws = draw_indices(plan, int(r), rng)
    return sample_from_draws(plan, draws)


def weight_vector(sample: WeightedSample, plan: SamplingPlan) -> np.ndarray:
    """Dense length-N weights ``c_j / (r pi_j)``; zero for unsampled rows."""
    counts = _kernels.count_draws(sample.draws, plan.N)
    return counts / (sample.r * plan.pi)


def _rank_check(R, shape):
    s = np.linalg.svd(R, compute_uv=False)
    p = shape[1]
    if s.size < p:
        return s.size
    tol = max(shape) * np.finfo(np.float64).eps * s[0]
    rank = int(np.sum(s > tol))
    return rank


def solve_scaled(rows, y, scale):
    """QR solve of ``min ||diag(scale) (y - rows b)||``.

    Returns ``(beta, gram_inv)`` with ``gram_inv = (A^T A)^{-1}``, ``A`` the
    scaled rows.  Raises :class:`SingularSampleError` if ``A`` has rank < p.
    """
    A = rows * scale[:, None]
    b = y * scale
    p = rows.shape[1]
    Q, R = np.linalg.qr(A)
    rank = _rank_check(R, A.shape)
    if rank < p:
        raise SingularSampleError(
            f"sampled design has numerical rank {rank} < p={p}; increase r or the floor mix",
            rank=rank)
    beta = solve_triangular(R, Q.T @ b)
    R_inv = solve_triangular(R, np.eye(p))
    gram_inv = R_inv @ R_inv.T
    return beta, 0.5 * (gram_inv + gram_inv.T)


def solve_weighted(dataset: Dataset, sample: WeightedSample) -> LevFit:
    rows = dataset.X[sample.draws]
    beta, gram_inv = solve_scaled(rows, dataset.Y[sample.draws], sample.scale)
    return LevFit(beta, gram_inv, sample, rows)


def ols_fit(dataset: Dataset) -> OLSFit:
    """Full-data least squares by QR; ``sigma2_hat`` is NaN when N == p."""
    X, Y = dataset.X, dataset.Y
    N, p = X.shape
    Q, R = np.linalg.qr(X)
    rank = _rank_check(R, X.shape)
    if rank < p:
        raise RankDeficientError(f"X is rank deficient: numerical rank {rank} < p={p}", rank=rank)
    beta = solve_triangular(R, Q.T @ Y)
    R_inv = solve_triangular(R, np.eye(p))
    gram_inv = R_inv @ R_inv.T
    resid = Y - X @ beta
    sigma2 = float(resid @ resid / (N - p)) if N > p else float("nan")
    return OLSFit(beta, 0.5 * (gram_inv + gram_inv.T), sigma2)
