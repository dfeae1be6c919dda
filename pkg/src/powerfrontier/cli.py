"""Command-line front end.

Subcommands::

    powerfrontier estimate DATA.csv [--p P] [--h H] [--kernel K] [--gamma G] [--grid N] [--ci LEVEL]
    powerfrontier simulate --n N [--frontier g1|g2] [--covariate uniform|beta22] [--gamma G] [--seed S]
    powerfrontier experiment [--config FILE] [--m M] [--seed S] [--out REPORT.csv] [--trace TRACE.csv]
    powerfrontier coverage [--n N] [--level L] [--m M] [--points 0.3,0.5,0.7]

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical degeneracy.
Rule-based defaults (``p = sqrt(n)``, ``h = 4 sd(X) / sqrt(n)``) apply to any
flag left out and are logged to standard error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from contextlib import contextmanager

import numpy as np

from .errors import DataError, DegenerateBandwidthError, DomainError, UndefinedBandError
from .estimators import EstimatorConfig, confidence_band_grid, estimate_frontier_grid
from .experiment import (
    DEFAULT_ESTIMATORS,
    CellError,
    Estimator,
    ExperimentConfig,
    coverage_study,
    rule_bandwidth,
    rule_power,
    run_experiment,
)
from .kernels import KernelFamily, make_kernel
from .simulation import Covariate, FrontierModel, generate_sample, read_sample_csv, write_sample_csv

log = logging.getLogger("powerfrontier")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class NumericError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text):
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text):
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _seed(text):
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


@contextmanager
def _open_out(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _fmt(v) -> str:
    return repr(float(v))


# -- estimate -----------------------------------------------------------------

def cmd_estimate(args) -> int:
    try:
        sample = read_sample_csv(sys.stdin if args.input == "-" else args.input)
    except FileNotFoundError as exc:
        raise DataError(f"cannot read {args.input}: {exc.strerror}") from None
    kernel = make_kernel(args.kernel)
    if args.p is None:
        p = rule_power(sample.n)
        log.info("p not given; using sqrt(n) = %.6g", p)
    else:
        p = args.p
    if args.h is None:
        h = rule_bandwidth(sample)
        log.info("h not given; using 4*sd(X)/sqrt(n) = %.6g", h)
    else:
        h = args.h
    cfg = EstimatorConfig(p=p, h=h, kernel=kernel)

    x = sample.x[:, 0]
    lo = x.min() if args.grid_min is None else args.grid_min
    hi = x.max() if args.grid_max is None else args.grid_max
    if args.grid < 1:
        raise UsageError("--grid must be >= 1")
    grid = np.array([(lo + hi) / 2.0]) if args.grid == 1 else np.linspace(lo, hi, args.grid)
    log.info("grid: %d points on [%.6g, %.6g]", grid.size, grid[0], grid[-1])

    gamma = args.gamma
    if args.ci is not None and gamma not in (None, 1.0):
        raise UsageError("--ci is only available for the uncorrected estimator (omit --gamma or use 1)")
    est = estimate_frontier_grid(sample, cfg, grid, gamma=gamma)
    if not est.defined.any():
        raise NumericError("estimate undefined at every grid point (no sample point within h); increase --h")
    bands = confidence_band_grid(sample, cfg, grid, args.ci) if args.ci is not None else None

    with _open_out(args.output) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "ghat", "defined"] + (["ci_lo", "ci_hi"] if bands else []))
        for j, xj in enumerate(grid):
            row = [_fmt(xj), _fmt(est.values[j]), int(est.defined[j])]
            if bands:
                row += [_fmt(bands.lower[j]), _fmt(bands.upper[j])]
            w.writerow(row)
    return EXIT_OK


# -- simulate -----------------------------------------------------------------

def cmd_simulate(args) -> int:
    model = FrontierModel(args.frontier, args.gamma, args.covariate, args.seed)
    log.info("simulating n=%d frontier=%s covariate=%s gamma=%g seed=%d",
             args.n, args.frontier, args.covariate, args.gamma, args.seed)
    sample = generate_sample(model, args.n)
    with _open_out(args.output) as fh:
        write_sample_csv(sample, fh)
    return EXIT_OK


# -- experiment ---------------------------------------------------------------

_CONFIG_KEYS = {
    "n_values": _int_list,
    "gamma_values": _float_list,
    "frontier": str,
    "covariate": str,
    "estimators": lambda t: tuple(s.strip() for s in t.split(",") if s.strip()),
    "m": int,
    "seed": _seed,
    "base_seed": _seed,
    "grid_size": int,
    "kernel": str,
}


def read_config_file(path) -> dict:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DataError(f"expected key=value, got {line!r}", line=lineno)
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in _CONFIG_KEYS:
                raise DataError(f"unknown key {key!r}", line=lineno)
            try:
                out["base_seed" if key == "seed" else key] = _CONFIG_KEYS[key](value)
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise DataError(f"bad value for {key}: {exc}", line=lineno) from None
    return out


def cmd_experiment(args) -> int:
    settings = read_config_file(args.config) if args.config else {}
    inline = {
        "n_values": args.n_values, "gamma_values": args.gammas, "frontier": args.frontier,
        "covariate": args.covariate, "estimators": args.estimators, "m": args.m,
        "base_seed": args.seed, "grid_size": args.grid_size, "kernel": args.kernel,
    }
    settings.update({k: v for k, v in inline.items() if v is not None})
    config = ExperimentConfig(**settings)
    log.info("experiment: n=%s gamma=%s frontier=%s covariate=%s m=%d seed=%d grid=%d estimators=%s",
             ",".join(map(str, config.n_values)), ",".join(f"{g:g}" for g in config.gamma_values),
             config.frontier, config.covariate.value, config.m, config.base_seed, config.grid_size,
             ",".join(e.value for e in config.estimators))
    report = run_experiment(config, workers=args.workers)
    if args.out:
        report.to_csv(args.out)
        print(report.format_table(), end="")
    else:
        # CSV owns stdout; the readable table goes to stderr
        report.to_csv(sys.stdout)
        print(report.format_table(), end="", file=sys.stderr)
    if args.trace:
        report.trace_to_csv(args.trace)
    for key, msg in report.failures.items():
        log.error("%s", msg)
    if not report.cells:
        return EXIT_NUMERIC
    return EXIT_OK


# -- coverage -----------------------------------------------------------------

def cmd_coverage(args) -> int:
    model = FrontierModel(args.frontier, 1.0, args.covariate, args.seed)
    log.info("coverage: n=%d level=%g m=%d points=%s", args.n, args.level, args.m,
             ",".join(f"{p:g}" for p in args.points))
    res = coverage_study(model, args.n, args.level, args.m, args.points)
    with _open_out(args.output) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "coverage", "n_defined"])
        for x, c, k in zip(res.points, res.coverage, res.n_defined):
            w.writerow([_fmt(x), _fmt(c), int(k)])
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="powerfrontier", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    frontiers = ["g1", "g2"]
    covariates = [c.value for c in Covariate]

    est = sub.add_parser("estimate", help="estimate the frontier of x,y data on a grid")
    est.add_argument("input", help="CSV file with header x,y ('-' for stdin)")
    est.add_argument("-o", "--output", default="-", help="output CSV (default stdout)")
    est.add_argument("--p", type=float, help="power exponent (default sqrt(n))")
    est.add_argument("--h", type=float, help="bandwidth (default 4*sd(X)/sqrt(n))")
    est.add_argument("--kernel", default="cosine2", choices=[k.value for k in KernelFamily])
    est.add_argument("--gamma", type=float, help="known tail exponent; enables the beta correction")
    est.add_argument("--grid", type=int, default=101, help="number of grid points (default 101)")
    est.add_argument("--grid-min", type=float)
    est.add_argument("--grid-max", type=float)
    est.add_argument("--ci", type=float, metavar="LEVEL", help="add pointwise confidence bands")
    est.set_defaults(func=cmd_estimate)

    sim = sub.add_parser("simulate", help="draw a sample from a simulation design")
    sim.add_argument("--frontier", default="g2", choices=frontiers)
    sim.add_argument("--covariate", default="uniform", choices=covariates)
    sim.add_argument("--gamma", type=float, default=1.0)
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--seed", type=_seed, default=0)
    sim.add_argument("-o", "--output", default="-")
    sim.set_defaults(func=cmd_simulate)

    exp = sub.add_parser("experiment", help="Monte Carlo comparison of estimators")
    exp.add_argument("--config", help="flat key=value configuration file")
    exp.add_argument("--n-values", type=_int_list)
    exp.add_argument("--gammas", type=_float_list)
    exp.add_argument("--frontier", choices=frontiers)
    exp.add_argument("--covariate", choices=covariates)
    exp.add_argument("--estimators", type=lambda t: tuple(s for s in t.split(",") if s),
                     help="comma list of " + ",".join(e.value for e in Estimator)
                     + " (default " + ",".join(e.value for e in DEFAULT_ESTIMATORS) + ")")
    exp.add_argument("--m", type=int)
    exp.add_argument("--seed", type=_seed)
    exp.add_argument("--grid-size", type=int)
    exp.add_argument("--kernel", choices=[k.value for k in KernelFamily])
    exp.add_argument("--out", help="report CSV path (default: CSV on stdout)")
    exp.add_argument("--trace", help="per-replication trace CSV path")
    exp.add_argument("--workers", type=int, default=None)
    exp.set_defaults(func=cmd_experiment)

    cov = sub.add_parser("coverage", help="empirical coverage of pointwise bands (gamma = 1)")
    cov.add_argument("--frontier", default="g2", choices=frontiers)
    cov.add_argument("--covariate", default="uniform", choices=covariates)
    cov.add_argument("--n", type=int, default=1000)
    cov.add_argument("--level", type=float, default=0.95)
    cov.add_argument("--m", type=int, default=200)
    cov.add_argument("--points", type=_float_list, default=(0.3, 0.5, 0.7))
    cov.add_argument("--seed", type=_seed, default=0)
    cov.add_argument("-o", "--output", default="-")
    cov.set_defaults(func=cmd_coverage)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(name)s: %(message)s", stream=sys.stderr, force=True)
    try:
        return args.func(args)
    except UsageError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except DataError as exc:
        log.error("data error: %s", exc)
        return EXIT_DATA
    except (NumericError, DegenerateBandwidthError, UndefinedBandError) as exc:
        log.error("numerical degeneracy: %s", exc)
        return EXIT_NUMERIC
    except CellError as exc:
        log.error("%s", exc)
        return EXIT_NUMERIC
    except DomainError as exc:
        log.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
