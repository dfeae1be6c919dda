"""Monte Carlo comparison of frontier estimators.

Each cell ``(estimator, n, gamma)`` simulates ``m`` samples, fits the
estimator with the data-driven rules ``h = 4 * sd(X) / sqrt(n)`` and
``p = sqrt(n)``, and records the L1 distance to the true frontier on a
regular grid of [0, 1]. Replication ``r`` (1-based) always uses the seed
``base_seed XOR r``, so all cells see the same random streams and any cell
can be recomputed on its own.

Grid points where an estimator has no kernel mass are left out of the L1
mean and reported through ``undefined_fraction`` instead of being imputed.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateBandwidthError, DomainError
from .estimators import (
    EstimatorConfig,
    Sample,
    confidence_band_grid,
    estimate_frontier,
    estimate_frontier_grid,
    estimate_geffroy,
    geffroy_cells_for_bandwidth,
)
from .kernels import make_kernel
from .numerics import check_power_inequality_i, check_root_inequality_ii, sample_stddev
from .simulation import Covariate, FrontierModel, generate_sample, replication_seed, sample_response

REPORT_COLUMNS = ("estimator", "n", "gamma", "mean_l1", "min_l1", "max_l1", "undefined_fraction")
TRACE_COLUMNS = ("estimator", "n", "gamma", "rep", "l1")
BANDWIDTH_SCALE = 4.0


class Estimator(str, enum.Enum):
    POWER_KERNEL = "power_kernel"
    POWER_KERNEL_P1 = "power_kernel_p1"
    GEFFROY = "geffroy"
    CORRECTED_GAMMA = "corrected_gamma"
    # smoothed bias-corrected Geffroy estimator: reserved, not implemented
    KERNEL_GEFFROY = "kernel_geffroy"


DEFAULT_ESTIMATORS = (Estimator.POWER_KERNEL, Estimator.POWER_KERNEL_P1, Estimator.GEFFROY)


# -- parameter rules ---------------------------------------------------------

def rule_bandwidth(sample: Sample, scale: float = BANDWIDTH_SCALE) -> float:
    """``h = 4 * sd(X) * n**-0.5`` for a one-dimensional sample."""
    if sample.dimension != 1:
        raise DomainError("the bandwidth rule is defined for one-dimensional covariates")
    if sample.n < 2:
        raise DomainError("the bandwidth rule needs n >= 2")
    x = sample.x[:, 0]
    sd = sample_stddev(x)
    # a constant column can leave a rounding residue in the variance
    if not sd > 0 or x.min() == x.max():
        raise DegenerateBandwidthError("covariate has zero variance; bandwidth rule degenerates")
    return scale * sd / math.sqrt(sample.n)


def rule_power(n: int) -> float:
    """``p = sqrt(n)``, not rounded."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return math.sqrt(n)


def rate_bandwidth(n: int, d: int = 1, alpha: float = 1.0) -> float:
    """Rate-optimal window ``n**(-1/(d + alpha))``."""
    if n < 1 or d < 1 or not 0 < alpha <= 1:
        raise DomainError("need n >= 1, d >= 1 and alpha in (0, 1]")
    return n ** (-1.0 / (d + alpha))


def rate_power(n: int, d: int = 1, alpha: float = 1.0, eps: float = 1.0) -> float:
    """Power ``eps * n**(alpha/(d + alpha))``, floored at 1.

    Asymptotic normality needs ``eps -> 0`` slowly; ``eps = 1`` gives the
    simulation rule ``sqrt(n)`` when ``d = alpha = 1``.
    """
    if n < 1 or d < 1 or not 0 < alpha <= 1 or not eps > 0:
        raise DomainError("need n >= 1, d >= 1, alpha in (0, 1] and eps > 0")
    return max(1.0, eps * n ** (alpha / (d + alpha)))


def default_grid(size: int = 201) -> np.ndarray:
    if size < 2:
        raise DomainError(f"grid_size must be >= 2, got {size}")
    return np.linspace(0.0, 1.0, int(size))


# -- L1 error ----------------------------------------------------------------

@dataclass(frozen=True)
class L1Error:
    error: float
    undefined_fraction: float
    valid: bool


def _check_grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise DomainError("grid must hold at least 2 strictly increasing points")
    return grid


def l1_error_values(values, defined, truth, grid) -> L1Error:
    """L1 distance from precomputed estimates; the grid spacing is assumed regular."""
    grid = _check_grid(grid)
    values = np.asarray(values, dtype=float)
    defined = np.asarray(defined, dtype=bool)
    truth = np.asarray(truth, dtype=float)
    n_def = int(defined.sum())
    undefined_fraction = 1.0 - n_def / grid.size
    if n_def == 0:
        return L1Error(math.nan, 1.0, False)
    length = grid[-1] - grid[0]
    err = float(np.mean(np.abs(values[defined] - truth[defined]))) * length
    return L1Error(err, undefined_fraction, True)


def l1_error(estimate_fn: Callable, truth_fn: Callable, grid) -> L1Error:
    """Mean absolute deviation over the defined grid points, times the support length.

    ``estimate_fn`` maps a grid point to a :class:`PointEstimate` (or to a
    plain number, taken as always defined).
    """
    grid = _check_grid(grid)
    values = np.empty(grid.size)
    defined = np.empty(grid.size, dtype=bool)
    for j, x in enumerate(grid):
        est = estimate_fn(float(x))
        if hasattr(est, "defined"):
            defined[j] = est.defined
            values[j] = est.value
        else:
            defined[j] = True
            values[j] = float(est)
    truth = np.array([truth_fn(float(x)) for x in grid])
    return l1_error_values(values, defined, truth, grid)


# -- experiment --------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    """Design of a Monte Carlo comparison. Defaults follow the published study."""

    n_values: tuple = (200, 300, 500, 1000)
    gamma_values: tuple = (1.0, 2.0, 3.0)
    covariate: Covariate = Covariate.BETA22
    frontier: str = "g2"
    m: int = 100
    grid_size: int = 201
    estimators: tuple = DEFAULT_ESTIMATORS
    base_seed: int = 0
    kernel: str = "cosine2"

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(self, "gamma_values", tuple(float(g) for g in self.gamma_values))
        try:
            object.__setattr__(self, "estimators", tuple(Estimator(e) for e in self.estimators))
        except ValueError as exc:
            raise DomainError(str(exc)) from None
        object.__setattr__(self, "covariate", Covariate(self.covariate))
        if self.m < 1:
            raise DomainError(f"m must be >= 1, got {self.m}")
        if self.grid_size < 2:
            raise DomainError(f"grid_size must be >= 2, got {self.grid_size}")
        if not self.n_values or any(n < 2 for n in self.n_values):
            raise DomainError("n_values must be non-empty and all >= 2")
        if not self.gamma_values or any(not g > 0 for g in self.gamma_values):
            raise DomainError("gamma_values must be non-empty and positive")
        if not self.estimators:
            raise DomainError("at least one estimator is required")
        # validates frontier name and seed range
        self.model(1.0, 0)

    def model(self, gamma: float, seed: int) -> FrontierModel:
        return FrontierModel(self.frontier, gamma, self.covariate, seed)

    def cells(self):
        for est in self.estimators:
            for n in self.n_values:
                for gamma in self.gamma_values:
                    yield est, n, gamma


@dataclass(frozen=True)
class CellResult:
    mean_l1: float
    min_l1: float
    max_l1: float
    undefined_fraction: float
    errors: tuple = field(default=(), repr=False)

    def __post_init__(self):
        if not self.min_l1 <= self.mean_l1 <= self.max_l1:
            # mean of identical floats can drift by an ulp
            mean = min(max(self.mean_l1, self.min_l1), self.max_l1)
            object.__setattr__(self, "mean_l1", mean)


class CellError(RuntimeError):
    """A cell could not be computed; the message names the cell."""


def fit_on_grid(estimator: Estimator, sample: Sample, grid, gamma: float, kernel=None):
    """Fit ``estimator`` with the data-driven rules and evaluate it on ``grid``.

    Returns ``(values, defined)`` arrays.
    """
    estimator = Estimator(estimator)
    kernel = kernel if kernel is not None else make_kernel()
    h = rule_bandwidth(sample)
    if estimator is Estimator.GEFFROY:
        step = estimate_geffroy(sample, geffroy_cells_for_bandwidth(h), support=(0.0, 1.0))
        values = step(grid)
        return values, np.ones(values.shape, dtype=bool)
    if estimator is Estimator.KERNEL_GEFFROY:
        raise DomainError("the smoothed Geffroy estimator is not available in this package")
    p = 1.0 if estimator is Estimator.POWER_KERNEL_P1 else rule_power(sample.n)
    cfg = EstimatorConfig(p=p, h=h, kernel=kernel)
    corr = gamma if estimator is Estimator.CORRECTED_GAMMA else None
    est = estimate_frontier_grid(sample, cfg, grid, gamma=corr)
    return est.values, est.defined


def replication_errors(config: ExperimentConfig, estimator, n: int, gamma: float) -> list[L1Error]:
    """Per-replication L1 errors of one cell, in replication order."""
    grid = default_grid(config.grid_size)
    kernel = make_kernel(config.kernel)
    out = []
    for r in range(1, config.m + 1):
        model = config.model(gamma, replication_seed(config.base_seed, r))
        sample = generate_sample(model, n)
        values, defined = fit_on_grid(estimator, sample, grid, gamma, kernel)
        out.append(l1_error_values(values, defined, model.g(grid), grid))
    return out


def run_cell(config: ExperimentConfig, estimator, n: int, gamma: float) -> CellResult:
    """Mean, min and max L1 error over the ``m`` replications of one cell.

    Replications whose every grid point is undefined are dropped from the
    mean/min/max and count as fully undefined.
    """
    estimator = Estimator(estimator)
    try:
        reps = replication_errors(config, estimator, n, gamma)
    except Exception as exc:
        raise CellError(f"cell ({estimator.value}, n={n}, gamma={gamma}): {exc}") from exc
    errs = np.array([e.error for e in reps if e.valid])
    undef = float(np.mean([e.undefined_fraction for e in reps]))
    if errs.size == 0:
        raise CellError(f"cell ({estimator.value}, n={n}, gamma={gamma}): no valid replication")
    return CellResult(
        float(errs.mean()), float(errs.min()), float(errs.max()), undef,
        tuple(e.error for e in reps),
    )


@dataclass
class ExperimentReport:
    """Cell results keyed by ``(estimator, n, gamma)``, plus per-cell failures."""

    cells: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)

    def get(self, estimator, n, gamma) -> CellResult:
        return self.cells[(Estimator(estimator), int(n), float(gamma))]

    def to_csv(self, path_or_file=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for (est, n, gamma), c in self.cells.items():
            w.writerow([est.value, n, repr(gamma), repr(c.mean_l1), repr(c.min_l1),
                        repr(c.max_l1), repr(c.undefined_fraction)])
        text = buf.getvalue()
        _emit(text, path_or_file)
        return text

    def trace_to_csv(self, path_or_file=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for (est, n, gamma), c in self.cells.items():
            for r, err in enumerate(c.errors, start=1):
                w.writerow([est.value, n, repr(gamma), r, repr(err)])
        text = buf.getvalue()
        _emit(text, path_or_file)
        return text

    def format_table(self) -> str:
        """Text layout with one block per gamma, rows by n, columns by estimator."""
        ests = list(dict.fromkeys(k[0] for k in self.cells))
        ns = sorted({k[1] for k in self.cells})
        gammas = sorted({k[2] for k in self.cells})
        width = 26
        lines = []
        for gamma in gammas:
            lines.append(f"gamma = {gamma:g}")
            lines.append(f"{'n':>6} " + "".join(f"{e.value:>{width}}" for e in ests))
            for n in ns:
                row = f"{n:>6} "
                for e in ests:
                    c = self.cells.get((e, n, gamma))
                    txt = "failed" if c is None else f"{c.mean_l1:.3f} [{c.min_l1:.3f}, {c.max_l1:.3f}]"
                    row += f"{txt:>{width}}"
                lines.append(row)
            lines.append("")
        for key, msg in self.failures.items():
            lines.append(f"failed {key[0].value} n={key[1]} gamma={key[2]:g}: {msg}")
        return "\n".join(lines).rstrip() + "\n"


def _emit(text, path_or_file):
    if path_or_file is None:
        return
    if hasattr(path_or_file, "write"):
        path_or_file.write(text)
    else:
        with open(path_or_file, "w", newline="") as fh:
            fh.write(text)


def read_report_csv(path_or_file) -> dict:
    """Parse a report CSV into ``{(estimator, n, gamma): CellResult}``."""
    if hasattr(path_or_file, "read"):
        rows = list(csv.DictReader(path_or_file))
    else:
        with open(path_or_file, newline="") as fh:
            rows = list(csv.DictReader(fh))
    out = {}
    for row in rows:
        key = (Estimator(row["estimator"]), int(row["n"]), float(row["gamma"]))
        out[key] = CellResult(float(row["mean_l1"]), float(row["min_l1"]),
                              float(row["max_l1"]), float(row["undefined_fraction"]))
    return out


def _run_cell_safe(args):
    config, est, n, gamma = args
    try:
        return run_cell(config, est, n, gamma), None
    except CellError as exc:
        return None, str(exc)


def run_experiment(config: ExperimentConfig, workers: int | None = None) -> ExperimentReport:
    """Compute every cell of ``config``. A failing cell is recorded, not raised.

    ``workers > 1`` spreads cells over processes; results are identical to a
    serial run because each replication owns its seed.
    """
    keys = list(config.cells())
    jobs = [(config, *k) for k in keys]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_cell_safe, jobs))
    else:
        results = [_run_cell_safe(j) for j in jobs]
    report = ExperimentReport()
    for key, (res, err) in zip(keys, results):
        if res is None:
            report.failures[key] = err
        else:
            report.cells[key] = res
    return report


# -- coverage of the pointwise confidence bands -------------------------------

@dataclass(frozen=True)
class CoverageResult:
    points: np.ndarray
    coverage: np.ndarray
    n_defined: np.ndarray
    m: int
    level: float


def coverage_study(model: FrontierModel, n: int, level: float, m: int, eval_points: Sequence[float],
                   p: float | None = None, h_scale: float = BANDWIDTH_SCALE) -> CoverageResult:
    """Fraction of replications whose band covers g(x), per evaluation point.

    Requires ``model.gamma == 1`` (uniform responses under the frontier),
    the setting in which the normal approximation holds. ``model.seed``
    is the base seed; replication ``r`` uses ``seed XOR r``. Undefined bands
    are excluded; ``n_defined`` counts the rest.
    """
    if model.gamma != 1:
        raise DomainError("coverage_study requires gamma = 1")
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    pts = np.asarray(eval_points, dtype=float)
    truth = model.g(pts)
    kernel = make_kernel()
    hits = np.zeros(pts.size)
    n_def = np.zeros(pts.size, dtype=int)
    for r in range(1, m + 1):
        sample = generate_sample(replace(model, seed=replication_seed(model.seed, r)), n)
        cfg = EstimatorConfig(p=p if p is not None else rule_power(n),
                              h=rule_bandwidth(sample, h_scale), kernel=kernel)
        bands = confidence_band_grid(sample, cfg, pts, level)
        ok = bands.defined
        n_def += ok
        hits += ok & (bands.lower <= truth) & (truth <= bands.upper)
    with np.errstate(invalid="ignore", divide="ignore"):
        cov = np.where(n_def > 0, hits / np.maximum(n_def, 1), np.nan)
    return CoverageResult(pts, cov, n_def, m, level)


# -- audits of limit properties and auxiliary inequalities --------------------

def local_power_root(model: FrontierModel, x: float, p: float, n_local: int) -> float:
    """Estimator value divided by g(x) for a sample stacked at ``X = x``.

    With every covariate equal to ``x`` the kernel weights cancel and the
    result is ``((p + 1) * mean((Y/g(x))**p))**(1/p)``, which tends to 1 as
    ``p`` grows whatever the law of ``Y`` on ``[0, g(x)]``.
    """
    rng = model.rng()
    y = sample_response(model, np.full(n_local, float(x)), rng)
    sample = Sample(np.full(n_local, float(x)), y)
    est = estimate_frontier(sample, EstimatorConfig(p=p, h=1.0), x)
    return est.value / model.g(x)


@dataclass(frozen=True)
class InequalityAudit:
    n_samples: int
    power_failures: int
    root_failures: int


def audit_power_root_inequalities(n_samples: int = 10_000, p_max: float = 1000.0, seed: int = 0) -> InequalityAudit:
    """Check both power/root inequalities at random ``(u, p)`` pairs.

    ``p`` is drawn uniformly on ``[1, p_max]``; ``u`` uniformly on
    ``[-ln2/p, ln2/p]`` for the power bound and on ``(-1/2, 1/2)`` for the
    root bound (with ``C = 2``).
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    p = rng.uniform(1.0, p_max, n_samples)
    # shrink by one part in 1e12 so p*|u| cannot round past ln 2
    u1 = rng.uniform(-1.0, 1.0, n_samples) * (math.log(2.0) * (1 - 1e-12)) / p
    u2 = rng.uniform(-0.5, 0.5, n_samples)
    u2 = np.where(np.abs(u2) >= 0.5, 0.0, u2)
    bad1 = sum(not check_power_inequality_i(float(a), float(b)) for a, b in zip(u1, p))
    bad2 = sum(not check_root_inequality_ii(float(a), float(b), 2.0) for a, b in zip(u2, p))
    return InequalityAudit(n_samples, bad1, bad2)
