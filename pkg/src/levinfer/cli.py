"""Command-line interface.

Exit codes: 0 on success, 1 on domain errors (rank deficiency, singular
subsample, invalid configuration), 2 on IO and parse errors.
"""
from __future__ import annotations

import argparse
import io
import json
import os
import sys

from .bootstrap import BootstrapConfig, bootstrap_ci, bootstrap_sd, bootstrap_test
from .data_model import load_csv
from .errors import DataError, LevInferError
from .inference import infer_all, write_intervals_csv
from .leverage import exact_leverage, make_plan, sketched_leverage
from .reports import atomic_write, report_csv, roc_csv, timing_csv
from .sampling import draw_sample, solve_weighted
from .simulation import BOOTSTRAP, LEVERAGING, SimConfig, run_experiment

EXIT_DOMAIN = 1
EXIT_IO = 2


class ConfigError(LevInferError):
    pass


# ------------------------------------------------------------------ #
# config file
# ------------------------------------------------------------------ #

_LIST_KEYS = {"r_grid": int, "alpha_grid": float}
_SCALAR_KEYS = {"p": int, "N": int, "replications": int, "noise_variance": float, "B": int, "master_seed": int}


def parse_config_text(text: str) -> dict:
    """Parse flat ``key = value`` lines; ``#`` starts a comment, lists are comma-separated."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataError(f"config line {lineno}: expected 'key = value'", row=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        raw[key] = value
    return raw


def config_from_mapping(raw: dict) -> SimConfig:
    unknown = sorted(set(raw) - set(_LIST_KEYS) - set(_SCALAR_KEYS))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    kwargs = {}
    try:
        for key, value in raw.items():
            if key in _LIST_KEYS:
                conv = _LIST_KEYS[key]
                items = value.strip("[]() ").split(",") if isinstance(value, str) else value
                kwargs[key] = tuple(conv(str(v).strip()) for v in items if str(v).strip())
            else:
                kwargs[key] = _SCALAR_KEYS[key](value)
    except ValueError as exc:
        raise ConfigError(f"bad config value: {exc}") from None
    missing = [k for k in ("p", "N") if k not in kwargs]
    if missing:
        raise ConfigError(f"missing config keys: {', '.join(missing)}")
    try:
        return SimConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


# ------------------------------------------------------------------ #
# subcommands
# ------------------------------------------------------------------ #

def _emit(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        atomic_write(out, text)


def _plan_for(X, args):
    if args.sketch is not None:
        scores = sketched_leverage(X, args.sketch, seed=args.seed)
    else:
        scores = exact_leverage(X)
    return make_plan(scores, args.floor_mix)


def _fit(args):
    dataset = load_csv(args.input, args.response, not args.no_header)
    if args.r < dataset.p:
        raise ConfigError(f"--r ({args.r}) must be at least p ({dataset.p})")
    plan = _plan_for(dataset.X, args)
    fit = solve_weighted(dataset, draw_sample(plan, args.r, args.seed))
    return dataset, plan, fit


def cmd_leverage(args):
    dataset = load_csv(args.input, args.response, not args.no_header)
    if args.sketch is not None and not args.exact:
        scores = sketched_leverage(dataset.X, args.sketch, seed=args.seed)
    else:
        scores = exact_leverage(dataset.X)
    if args.format == "json":
        text = json.dumps({"exact": scores.exact, "h": [float(v) for v in scores.h]}) + "\n"
    else:
        text = "h\n" + "".join(f"{float(v)!r}\n" for v in scores.h)
    _emit(text, args.out)


def cmd_fit(args):
    dataset, _, fit = _fit(args)
    intervals, tests = infer_all(dataset, fit, args.alpha)
    if args.format == "json":
        text = json.dumps([{"j": ci.j, "estimate": ci.estimate, "lo": ci.lo, "hi": ci.hi,
                            "reject": tr.reject} for ci, tr in zip(intervals, tests)]) + "\n"
    else:
        text = "j,estimate,lo,hi,reject\n" + "".join(
            f"{ci.j},{ci.estimate!r},{ci.lo!r},{ci.hi!r},{int(tr.reject)}\n"
            for ci, tr in zip(intervals, tests))
    _emit(text, args.out)


def cmd_ci(args):
    dataset, plan, fit = _fit(args)
    if args.method == "bootstrap":
        delta = bootstrap_sd(dataset, plan, BootstrapConfig(args.B, args.r, args.seed))
        intervals = bootstrap_ci(fit.beta, delta, args.alpha)
        tests = bootstrap_test(fit.beta, delta, args.alpha)
    elif args.method == "known-sigma":
        if args.sigma is None:
            raise ConfigError("--sigma is required for the known-sigma method")
        intervals, tests = infer_all(dataset, fit, args.alpha, sigma=args.sigma)
    else:
        intervals, tests = infer_all(dataset, fit, args.alpha)
    if args.format == "json":
        text = json.dumps([{"j": ci.j, "estimate": ci.estimate, "lo": ci.lo, "hi": ci.hi,
                            "alpha": ci.alpha, "method": ci.method, "reject": tr.reject}
                           for ci, tr in zip(intervals, tests)]) + "\n"
    else:
        buf = io.StringIO()
        write_intervals_csv(buf, intervals, tests)
        text = buf.getvalue()
    _emit(text, args.out)


def _sim_config(args) -> SimConfig:
    raw = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            raw.update(parse_config_text(fh.read()))
    inline = {"p": args.p, "N": args.N, "r_grid": args.r_grid, "alpha_grid": args.alpha_grid,
              "replications": args.replications, "noise_variance": args.noise_variance,
              "B": args.B, "master_seed": args.seed}
    raw.update({k: v for k, v in inline.items() if v is not None})
    return config_from_mapping(raw)


def cmd_simulate(args):
    from .plotting import report_plots

    config = _sim_config(args)
    report = run_experiment(config, workers=args.workers)
    outputs = {
        "report.csv": report_csv(report),
        "roc.csv": roc_csv(report),
        "timing.csv": timing_csv(report),
    }
    outputs.update(report_plots(report))
    os.makedirs(args.out, exist_ok=True)
    for name, text in outputs.items():
        atomic_write(os.path.join(args.out, name), text)

    lines = [f"wrote {len(outputs)} files to {args.out}"]
    for r in config.r_grid:
        row_ci = report.row(r, config.alpha_grid[0], LEVERAGING)
        row_bs = report.row(r, config.alpha_grid[0], BOOTSTRAP)
        ratio = row_bs.time_ms / row_ci.time_ms if row_ci.time_ms > 0 else float("inf")
        lines.append(f"r={r}: ci {row_ci.time_ms:.3f} ms, bootstrap {row_bs.time_ms:.3f} ms, "
                     f"bootstrap/ci time ratio {ratio:.1f}")
    if report.redraws:
        lines.append(f"singular subsamples redrawn: {report.redraws}")
    print("\n".join(lines))


# ------------------------------------------------------------------ #
# argument parsing
# ------------------------------------------------------------------ #

def _csv_list(conv):
    def parse(text):
        try:
            return tuple(conv(v) for v in text.split(",") if v.strip())
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid list: {text!r}") from None
    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="levinfer", description="Leverage-score subsampled regression with confidence intervals.")
    sub = parser.add_subparsers(dest="command", required=True)

    def data_args(p):
        p.add_argument("input", help="CSV file with predictors and a response column")
        p.add_argument("--response", default="-1", help="response column name or index (default: last)")
        p.add_argument("--no-header", action="store_true", help="the file has no header row")
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--seed", type=int, default=None)

    def fit_args(p):
        p.add_argument("--r", type=int, required=True, help="number of draws")
        p.add_argument("--alpha", type=float, default=0.05)
        p.add_argument("--floor-mix", type=float, default=0.01, help="uniform mixing weight")
        p.add_argument("--sketch", type=int, default=None,
                       help="use sketched leverage with this sketch size (default: exact)")

    p = sub.add_parser("leverage", help="leverage scores, one per input row")
    data_args(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--exact", action="store_true", help="exact scores (default)")
    g.add_argument("--sketch", type=int, default=None, help="sketch size for approximate scores")
    p.set_defaults(func=cmd_leverage)

    p = sub.add_parser("fit", help="leveraged estimate with unknown-sigma intervals")
    data_args(p)
    fit_args(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("ci", help="confidence intervals and tests for every coefficient")
    data_args(p)
    fit_args(p)
    p.add_argument("--method", choices=("unknown-sigma", "known-sigma", "bootstrap"), default="unknown-sigma")
    p.add_argument("--sigma", type=float, default=None, help="error sd for known-sigma intervals")
    p.add_argument("--B", type=int, default=100, help="bootstrap replicates")
    p.set_defaults(func=cmd_ci)

    p = sub.add_parser("simulate", help="run the synthetic coverage/error/timing experiment")
    p.add_argument("--config", default=None, help="key = value config file")
    p.add_argument("--out", required=True, help="output directory (created if missing)")
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--r-grid", type=_csv_list(int), default=None)
    p.add_argument("--alpha-grid", type=_csv_list(float), default=None)
    p.add_argument("--replications", type=int, default=None)
    p.add_argument("--noise-variance", type=float, default=None)
    p.add_argument("--B", type=int, default=None)
    p.add_argument("--seed", type=int, default=None, help="master seed")
    p.add_argument("--workers", type=int, default=None, help="worker processes (capped by LEVINFER_THREADS)")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (DataError, OSError) as exc:
        print(f"levinfer: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (LevInferError, ValueError, ArithmeticError) as exc:
        print(f"levinfer: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return 0


if __name__ == "__main__":
    sys.exit(main())
