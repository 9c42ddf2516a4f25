"""Statistical leverage scores and the sampling distribution built from them."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import solve_triangular

from . import _kernels
from .errors import RankDeficientError, ZeroProbabilityError


@dataclass(frozen=True, eq=False)
class LeverageScores:
    h: np.ndarray
    exact: bool


@dataclass(frozen=True, eq=False)
class SamplingPlan:
    """Sampling probabilities over the N observations.

    The alias table used by :func:`levinfer.sampling.draw_sample` is built
    lazily, once per plan.
    """

    pi: np.ndarray
    floor_mix: float = 0.0

    def __post_init__(self):
        pi = np.array(self.pi, dtype=np.float64)
        if pi.ndim != 1 or pi.size == 0:
            raise ValueError("pi must be a non-empty vector")
        if not np.all(pi > 0):
            raise ZeroProbabilityError(
                f"{int(np.sum(pi <= 0))} observation(s) have zero sampling probability")
        if abs(pi.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {pi.sum()!r}, not 1")
        pi.flags.writeable = False
        object.__setattr__(self, "pi", pi)

    @property
    def N(self) -> int:
        return self.pi.shape[0]

    @cached_property
    def alias_table(self):
        return _kernels.alias_build(self.pi)


def uniform_plan(N: int) -> SamplingPlan:
    return SamplingPlan(np.full(N, 1.0 / N))


def _rank_tolerance(s, shape):
    return max(shape) * np.finfo(np.float64).eps * s[0]


def exact_leverage(X) -> LeverageScores:
    """Diagonal of the hat matrix from the thin SVD of ``X``.

    Raises :class:`RankDeficientError` when the smallest singular value is at
    or below ``max(N, p) * eps * s_max``.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    U, s, _ = np.linalg.svd(X, full_matrices=False)
    tol = _rank_tolerance(s, X.shape)
    rank = int(np.sum(s > tol))
    if rank < X.shape[1]:
        raise RankDeficientError(
            f"X is rank deficient: numerical rank {rank} < p={X.shape[1]}", rank=rank)
    h = np.einsum("ij,ij->i", U, U)
    return LeverageScores(np.clip(h, 0.0, 1.0), exact=True)


def default_sketch_size(p: int) -> int:
    return max(2 * p, 200)


def sketched_leverage(X, sketch_size: int, seed=None, projection=None) -> LeverageScores:
    """Approximate leverage scores against a Gaussian sketch of ``X``.

    ``h_i ~ x_i^T (X^T S^T S X)^{-1} x_i`` with ``S`` a ``sketch_size x N``
    matrix of iid N(0, 1/sketch_size) entries.  ``projection`` overrides ``S``
    (used to check the identity sketch reproduces exact scores).
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    N, p = X.shape
    if sketch_size < p:
        raise ValueError(f"sketch_size ({sketch_size}) must be at least p ({p})")
    if projection is None:
        rng = np.random.default_rng(seed)
        projection = rng.standard_normal((sketch_size, N)) / np.sqrt(sketch_size)
    SX = projection @ X
    R = np.linalg.qr(SX, mode="r")
    s = np.linalg.svd(R, compute_uv=False)
    tol = _rank_tolerance(s, SX.shape)
    rank = int(np.sum(s > tol))
    if rank < p:
        raise RankDeficientError(
            f"sketched Gram matrix is rank deficient: numerical rank {rank} < p={p}", rank=rank)
    # rows of X R^{-1}; solve R^T Z^T = X^T
    Z = solve_triangular(R, X.T, trans="T").T
    h = np.einsum("ij,ij->i", Z, Z)
    return LeverageScores(np.clip(h, 0.0, 1.0), exact=False)


def make_plan(scores: LeverageScores, floor_mix: float = 0.0) -> SamplingPlan:
    """``pi_i = (1 - lam) h_i / sum(h) + lam / N``."""
    h = np.asarray(scores.h if isinstance(scores, LeverageScores) else scores, dtype=np.float64)
    if not 0.0 <= floor_mix < 1.0:
        raise ValueError(f"floor_mix must lie in [0, 1), got {floor_mix}")
    if np.any(h < 0) or not np.all(np.isfinite(h)):
        raise ValueError("leverage scores must be finite and nonnegative")
    total = h.sum()
    if total <= 0:
        raise ZeroProbabilityError("all leverage scores are zero")
    if floor_mix == 0.0 and np.any(h == 0):
        raise ZeroProbabilityError(
            f"{int(np.sum(h == 0))} observation(s) have zero leverage; use floor_mix > 0")
    N = h.shape[0]
    pi = (1.0 - floor_mix) * (h / total) + floor_mix / N
    pi = pi / pi.sum()
    return SamplingPlan(pi, floor_mix=floor_mix)
