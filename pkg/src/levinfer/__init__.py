"""Algorithmic-leveraging least squares with finite-sample inference."""
from ._kernels import BACKEND
from .bootstrap import BootstrapConfig, bootstrap_ci, bootstrap_sd, bootstrap_test
from .data_model import Dataset, load_csv, validate, write_csv
from .errors import (BootstrapFailure, DataError, LevInferError, RankDeficientError,
                     SingularSampleError, ZeroProbabilityError)
from .inference import (Interval, SandwichVariance, TestResult, asymptotic_variance_oracle,
                        ci_known_sigma, ci_unknown_sigma, estimate_sigma2, sandwich_variance,
                        test_significance)
from .leverage import LeverageScores, SamplingPlan, exact_leverage, make_plan, sketched_leverage
from .quantiles import normal_quantile, t_quantile
from .sampling import LevFit, OLSFit, WeightedSample, draw_sample, ols_fit, solve_weighted, weight_vector
from .simulation import SimConfig, run_experiment

__version__ = "0.1.0"
