"""Synthetic-data experiments: coverage, error rates, ROC and timing against the bootstrap.

One ``(p, N)`` design and coefficient vector are generated per experiment and
reused across replications.  Every replication draws its own response vector,
then for each subsample size ``r`` fits the leveraged estimator, builds the
unknown-sigma intervals and the bootstrap intervals, and records coverage and
rejections over the whole ``alpha`` grid.

Random streams are keyed by ``(master_seed, purpose, replication, ...)`` so a
report is bit-identical however the replications are scheduled.
"""
from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ._rng import child_rng, child_seed
from .bootstrap import BootstrapConfig, bootstrap_replicates, sd_from_replicates
from .data_model import Dataset
from .errors import SingularSampleError
from .inference import estimate_sigma2, sandwich_variance, t_crit, z_crit
from .leverage import SamplingPlan, default_sketch_size, make_plan, sketched_leverage
from .sampling import draw_sample, solve_weighted

LEVERAGING = "leveraging-ci"
BOOTSTRAP = "bootstrap"
METHODS = (LEVERAGING, BOOTSTRAP)

FLOOR_MIX = 0.01
MAX_SAMPLE_ATTEMPTS = 100

# stream tags under the master seed
_DESIGN, _BETA, _SKETCH, _REPLICATION = range(4)
_NOISE, _SAMPLE, _BOOT = range(3)


@dataclass(frozen=True)
class SimConfig:
    p: int
    N: int
    r_grid: tuple = (100,)
    alpha_grid: tuple = (0.05,)
    replications: int = 100
    noise_variance: float = 9.0
    B: int = 100
    master_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "r_grid", tuple(int(r) for r in self.r_grid))
        object.__setattr__(self, "alpha_grid", tuple(float(a) for a in self.alpha_grid))
        problems = self.problems()
        if problems:
            raise ValueError("invalid simulation config: " + "; ".join(problems))

    def problems(self) -> list[str]:
        out = []
        if self.p < 4:
            out.append(f"p must be at least 4 (got {self.p})")
        if self.N <= self.p:
            out.append(f"N must exceed p (N={self.N}, p={self.p})")
        if not self.r_grid:
            out.append("r_grid is empty")
        out += [f"r={r} is smaller than p={self.p}" for r in self.r_grid if r < self.p]
        if not self.alpha_grid:
            out.append("alpha_grid is empty")
        out += [f"alpha={a} outside (0, 1]" for a in self.alpha_grid if not 0.0 < a <= 1.0]
        if self.replications < 1:
            out.append("replications must be positive")
        if not self.noise_variance > 0:
            out.append("noise_variance must be positive")
        if self.B < 2:
            out.append("B must be at least 2")
        return out


@dataclass(frozen=True)
class Metrics:
    coverage: float
    type1: float | None
    type2: float | None
    wall_time_ci: float
    wall_time_bootstrap: float


class ROCPoint(NamedTuple):
    alpha: float
    fpr: float
    tpr: float


class ReportRow(NamedTuple):
    p: int
    N: int
    r: int
    alpha: float
    method: str
    coverage: float
    type1: float | None
    type2: float | None
    time_ms: float


@dataclass
class ReplicationOutcome:
    """Raw per-coefficient results of one replication at one ``r``.

    ``covers[method]`` and ``reject[method]`` are boolean arrays of shape
    ``(len(alphas), p)``.
    """

    r: int
    alphas: np.ndarray
    beta_hat: np.ndarray
    covers: dict
    reject: dict
    time_ci: float
    time_bootstrap: float
    redraws: int = 0

    def records(self):
        """Yield ``(method, alpha, j, covers, reject)`` tuples."""
        for m in METHODS:
            for a_idx, a in enumerate(self.alphas):
                for j in range(self.covers[m].shape[1]):
                    yield m, float(a), j, bool(self.covers[m][a_idx, j]), bool(self.reject[m][a_idx, j])


@dataclass
class ExperimentReport:
    config: SimConfig
    rows: list = field(default_factory=list)
    roc: dict = field(default_factory=dict)
    redraws: int = 0

    def row(self, r, alpha, method) -> ReportRow:
        for row in self.rows:
            if row.r == r and row.alpha == alpha and row.method == method:
                return row
        raise KeyError((r, alpha, method))


# ------------------------------------------------------------------ #
# Data generation
# ------------------------------------------------------------------ #

def design_scale_matrix(p: int) -> np.ndarray:
    idx = np.arange(p)
    return 2.0 * 0.5 ** np.abs(idx[:, None] - idx[None, :])


def gen_design(N: int, p: int, seed=None, df: int = 3) -> np.ndarray:
    """Rows iid multivariate t with ``df`` degrees of freedom and scale ``2 * 0.5^|i-j|``."""
    if N <= p:
        raise ValueError(f"N must exceed p (N={N}, p={p})")
    rng = np.random.default_rng(seed)
    L = np.linalg.cholesky(design_scale_matrix(p))
    Z = rng.standard_normal((N, p)) @ L.T
    chi = rng.chisquare(df, size=N)
    return Z / np.sqrt(chi / df)[:, None]


def gen_beta(p: int, seed=None) -> np.ndarray:
    """Half zeros, a quarter +1, the rest -1 (floors), in random positions."""
    if p < 4:
        raise ValueError(f"p must be at least 4, got {p}")
    n0, n1 = p // 2, p // 4
    vals = np.array([0.0] * n0 + [1.0] * n1 + [-1.0] * (p - n0 - n1))
    return np.random.default_rng(seed).permutation(vals)


def gen_response(X, beta, noise_variance: float, seed=None) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    rng = np.random.default_rng(seed)
    eps = rng.standard_normal(X.shape[0]) * math.sqrt(noise_variance)
    return X @ np.asarray(beta, dtype=np.float64) + eps


def experiment_plan(X, config: SimConfig) -> SamplingPlan:
    p = X.shape[1]
    scores = sketched_leverage(X, default_sketch_size(p), seed=child_seed(config.master_seed, _SKETCH))
    return make_plan(scores, FLOOR_MIX)


def experiment_inputs(config: SimConfig):
    """The design, coefficients and sampling plan shared by every replication."""
    X = gen_design(config.N, config.p, child_seed(config.master_seed, _DESIGN))
    beta = gen_beta(config.p, child_seed(config.master_seed, _BETA))
    return X, beta, experiment_plan(X, config)


# ------------------------------------------------------------------ #
# Replication
# ------------------------------------------------------------------ #

def _replication_response(X, beta, config, replication_index):
    seed = child_seed(config.master_seed, _REPLICATION, replication_index, _NOISE)
    return gen_response(X, beta, config.noise_variance, seed)


def _leveraged_fit(dataset, plan, r, config, replication_index):
    for attempt in range(MAX_SAMPLE_ATTEMPTS):
        seed = child_seed(config.master_seed, _REPLICATION, replication_index, _SAMPLE, r, attempt)
        try:
            return solve_weighted(dataset, draw_sample(plan, r, seed)), attempt
        except SingularSampleError:
            continue
    raise SingularSampleError(f"{MAX_SAMPLE_ATTEMPTS} consecutive singular subsamples at r={r}")


def _replicate(dataset, beta, config, plan, r, replication_index) -> ReplicationOutcome:
    N, p = dataset.X.shape
    alphas = np.asarray(config.alpha_grid)
    fit, redraws = _leveraged_fit(dataset, plan, r, config, replication_index)
    b = fit.beta

    t0 = time.perf_counter()
    sw = sandwich_variance(fit)
    s2 = estimate_sigma2(dataset, fit)
    sd = np.sqrt(s2) * np.sqrt(np.clip(np.diag(sw.matrix), 0.0, None))
    crit = np.array([t_crit(a, N - p) for a in alphas])
    half = crit[:, None] * sd[None, :]
    lo, hi = b - half, b + half
    time_ci = time.perf_counter() - t0
    covers = {LEVERAGING: (lo <= beta) & (beta <= hi)}
    reject = {LEVERAGING: np.abs(b) >= half}

    t0 = time.perf_counter()
    boot_seed = child_seed(config.master_seed, _REPLICATION, replication_index, _BOOT, r)
    est, boot_redraws = bootstrap_replicates(dataset, plan, BootstrapConfig(config.B, r, boot_seed))
    delta = sd_from_replicates(est)
    z = np.array([z_crit(a) for a in alphas])
    half_b = z[:, None] * delta[None, :]
    lo_b, hi_b = b - half_b, b + half_b
    time_boot = time.perf_counter() - t0
    covers[BOOTSTRAP] = (lo_b <= beta) & (beta <= hi_b)
    reject[BOOTSTRAP] = np.abs(b) > half_b

    return ReplicationOutcome(r, alphas, b, covers, reject, time_ci, time_boot, redraws + boot_redraws)


def run_replication(X, beta, config: SimConfig, r: int, replication_index: int,
                    plan: SamplingPlan | None = None) -> ReplicationOutcome:
    """One pass of the protocol at subsample size ``r``.

    The response depends only on ``(master_seed, replication_index)``, so calls
    with different ``r`` share it.
    """
    X = np.asarray(X, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    if plan is None:
        plan = experiment_plan(X, config)
    Y = _replication_response(X, beta, config, replication_index)
    return _replicate(Dataset(X, Y), beta, config, plan, r, replication_index)


def _replication_all_r(X, beta, config, pi, replication_index):
    plan = SamplingPlan(pi, FLOOR_MIX)
    Y = _replication_response(X, beta, config, replication_index)
    dataset = Dataset(X, Y)
    return [_replicate(dataset, beta, config, plan, r, replication_index) for r in config.r_grid]


# ------------------------------------------------------------------ #
# Metrics
# ------------------------------------------------------------------ #

def _rates(covers, reject, beta):
    zero = beta == 0
    coverage = float(np.mean(covers))
    type1 = float(np.mean(reject[zero])) if zero.any() else None
    type2 = float(np.mean(~reject[~zero])) if (~zero).any() else None
    return coverage, type1, type2


def compute_metrics(outcome: ReplicationOutcome, beta) -> dict:
    """Per ``(alpha, method)`` metrics of one replication.

    ``type1`` is ``None`` when no coefficient is truly zero, ``type2`` when
    none is nonzero.
    """
    beta = np.asarray(beta)
    out = {}
    for m in METHODS:
        for a_idx, a in enumerate(outcome.alphas):
            cov, t1, t2 = _rates(outcome.covers[m][a_idx], outcome.reject[m][a_idx], beta)
            out[(float(a), m)] = Metrics(cov, t1, t2, outcome.time_ci, outcome.time_bootstrap)
    return out


def roc_curve(metrics_by_alpha) -> list[ROCPoint]:
    """``(alpha, FPR, TPR)`` points sorted by alpha, from ``{alpha: Metrics}``."""
    pts = []
    for a in sorted(metrics_by_alpha):
        m = metrics_by_alpha[a]
        if m.type1 is None or m.type2 is None:
            raise ValueError("ROC needs both true-zero and true-nonzero coefficients")
        pts.append(ROCPoint(float(a), m.type1, 1.0 - m.type2))
    return pts


def _mean_or_none(values):
    vals = [v for v in values if v is not None]
    return math.fsum(vals) / len(vals) if vals else None


# ------------------------------------------------------------------ #
# Experiment driver
# ------------------------------------------------------------------ #

def resolve_workers(workers: int | None, replications: int) -> int:
    if workers is None:
        workers = os.cpu_count() or 1
    cap = os.environ.get("LEVINFER_THREADS")
    if cap:
        workers = min(workers, max(1, int(cap)))
    return max(1, min(int(workers), replications))


def run_experiment(config: SimConfig, workers: int | None = None) -> ExperimentReport:
    X, beta, plan = experiment_inputs(config)
    n_workers = resolve_workers(workers, config.replications)
    reps = range(config.replications)
    if n_workers == 1:
        per_rep = [_replication_all_r(X, beta, config, plan.pi, i) for i in reps]
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            futures = [pool.submit(_replication_all_r, X, beta, config, plan.pi, i) for i in reps]
            per_rep = [f.result() for f in futures]
    return aggregate(config, beta, per_rep)


def aggregate(config: SimConfig, beta, per_rep) -> ExperimentReport:
    """Average metrics over replications (in replication order)."""
    report = ExperimentReport(config)
    report.redraws = sum(o.redraws for outs in per_rep for o in outs)
    for r_idx, r in enumerate(config.r_grid):
        metric_lists = [compute_metrics(outs[r_idx], beta) for outs in per_rep]
        times = {
            LEVERAGING: math.fsum(outs[r_idx].time_ci for outs in per_rep) / len(per_rep),
            BOOTSTRAP: math.fsum(outs[r_idx].time_bootstrap for outs in per_rep) / len(per_rep),
        }
        for m in METHODS:
            averaged = {}
            for a in config.alpha_grid:
                ms = [ml[(a, m)] for ml in metric_lists]
                cov = math.fsum(x.coverage for x in ms) / len(ms)
                t1 = _mean_or_none([x.type1 for x in ms])
                t2 = _mean_or_none([x.type2 for x in ms])
                averaged[a] = Metrics(cov, t1, t2, times[LEVERAGING], times[BOOTSTRAP])
                report.rows.append(ReportRow(config.p, config.N, r, a, m, cov, t1, t2, 1e3 * times[m]))
            if all(v.type1 is not None and v.type2 is not None for v in averaged.values()):
                report.roc[(r, m)] = roc_curve(averaged)
    return report
