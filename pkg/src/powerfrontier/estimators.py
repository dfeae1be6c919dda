"""Frontier estimators.

The main estimator is a kernel regression of the power-transformed responses,
brought back to the response scale by a 1/p root::

    g_hat(x) = ((p + 1) * sum_i K_h(x - X_i) Y_i**p / sum_i K_h(x - X_i)) ** (1/p)

For large p the sum ``sum_i w_i Y_i**p`` overflows (or underflows) long before
the ratio becomes meaningless, so it is always evaluated as a log-sum-exp of
``p*log(Y_i) + log(w_i)``. A point with no kernel mass gives an undefined
estimate (``defined=False``), not an exception; grid evaluations near the
edges of the design rely on that.

Also here: the kernel density estimate ``f_hat``, the power-regression
numerator ``phi_hat``, the tail-index corrected estimator, Geffroy's
per-cell maximum, and pointwise confidence bands built from the asymptotic
normality of ``g_hat(x) / g(x)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from .errors import DomainError, UndefinedBandError
from .kernels import KernelSpec, as_point_rows, kernel_values, make_kernel, scaled_weights
from .numerics import NEG_INF, LogWeightedPowerSum, log_beta, log_sum_exp_rows


@dataclass(frozen=True, eq=False)
class Sample:
    """Observed pairs ``(X_i, Y_i)``; ``x`` has shape ``(n, d)``, ``y`` shape ``(n,)``."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float).ravel()
        raw_x = np.asarray(self.x, dtype=float)
        dim = 1 if raw_x.ndim <= 1 else raw_x.shape[1]
        x = as_point_rows(raw_x, dim)
        if x.shape[0] != y.shape[0]:
            raise DomainError(f"{x.shape[0]} covariates but {y.shape[0]} responses")
        if not np.all(np.isfinite(x)) or not np.all(np.isfinite(y)):
            raise DomainError("sample contains non-finite values")
        if np.any(y < 0):
            raise DomainError("responses must be non-negative")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def dimension(self) -> int:
        return self.x.shape[1]

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, Sample):
            return NotImplemented
        return np.array_equal(self.x, other.x) and np.array_equal(self.y, other.y)


@dataclass(frozen=True)
class EstimatorConfig:
    """Power ``p``, bandwidth ``h`` and kernel; ``alpha`` only feeds the rate rules."""

    p: float
    h: float
    kernel: KernelSpec = field(default_factory=make_kernel)
    alpha: float = 1.0

    def __post_init__(self):
        if not self.p >= 1 or math.isinf(self.p):
            raise DomainError(f"p must be a finite real >= 1, got {self.p}")
        if not self.h > 0 or math.isinf(self.h):
            raise DomainError(f"h must be positive and finite, got {self.h}")
        if not 0 < self.alpha <= 1:
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha}")


@dataclass(frozen=True)
class PointEstimate:
    """Frontier height at one point. ``value`` is NaN whenever ``defined`` is False."""

    value: float
    n_effective: int
    defined: bool


@dataclass(frozen=True)
class ConfidenceBand:
    """Pointwise band for g(x) from the pivot ``sigma_inv * (g_hat/g - 1) ~ N(0, 1)``.

    Solving ``|g_hat/g - 1| <= half_width_rel`` for g gives
    ``[center / (1 + half_width_rel), center / (1 - half_width_rel)]``; the
    upper end is infinite once ``half_width_rel >= 1``.
    """

    center: float
    half_width_rel: float
    level: float

    @property
    def lower(self) -> float:
        return self.center / (1.0 + self.half_width_rel)

    @property
    def upper(self) -> float:
        if self.upper_infinite:
            return math.inf
        return self.center / (1.0 - self.half_width_rel)

    @property
    def upper_infinite(self) -> bool:
        return self.half_width_rel >= 1.0

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


def _check(sample: Sample, cfg: EstimatorConfig):
    if sample.n == 0:
        raise DomainError("empty sample")
    if cfg.kernel.dimension != sample.dimension:
        raise DomainError(
            f"kernel dimension {cfg.kernel.dimension} does not match sample dimension {sample.dimension}"
        )


def _log_constant(p: float, gamma: float | None) -> float:
    # gamma == 1 takes the exact path so the corrected estimator reproduces
    # g_hat bit for bit: 1 / B(1 + p, 1) = p + 1
    if gamma is None or gamma == 1:
        return math.log(p + 1.0)
    if not gamma > 0 or math.isinf(gamma):
        raise DomainError(f"gamma must be positive and finite, got {gamma}")
    return -(math.log(gamma) + log_beta(1.0 + p, gamma))


@dataclass(frozen=True)
class GridEstimate:
    """Vectorised counterpart of :class:`PointEstimate` over evaluation points."""

    points: np.ndarray
    values: np.ndarray
    n_effective: np.ndarray
    defined: np.ndarray

    def __getitem__(self, j) -> PointEstimate:
        return PointEstimate(float(self.values[j]), int(self.n_effective[j]), bool(self.defined[j]))

    def __len__(self):
        return self.values.shape[0]


def _window_weights(sample: Sample, cfg: EstimatorConfig, points):
    """Kernel weights restricted to the points inside each window (d = 1).

    Returns ``(weights, responses)`` of shape ``(len(points), width)``, padded
    with zero weights, where ``width`` is the largest window population.
    """
    order = np.argsort(sample.x[:, 0], kind="stable")
    xs = sample.x[order, 0]
    ys = sample.y[order]
    x = points[:, 0]
    # widened by a hair; the kernel support test decides membership
    reach = cfg.h * (1.0 + 1e-9)
    lo = np.searchsorted(xs, x - reach, side="left")
    hi = np.searchsorted(xs, x + reach, side="right")
    width = int((hi - lo).max(initial=0))
    if width == 0:
        return np.zeros((x.size, 0)), np.zeros((x.size, 0))
    offs = np.arange(width)
    idx = np.minimum(lo[:, None] + offs[None, :], xs.size - 1)
    inside = offs[None, :] < (hi - lo)[:, None]
    w = kernel_values(cfg.kernel, (x[:, None] - xs[idx]) / cfg.h) / cfg.h
    w = np.where(inside, w, 0.0)
    return w, ys[idx]


def _log_power_sums(sample: Sample, cfg: EstimatorConfig, points):
    """Return (weights, log sum_i w_i Y_i**p) for each evaluation point.

    ``weights`` only holds the nonzero-capable columns for d = 1, so it is
    suitable for row sums and counts but not for indexing the sample.
    """
    if sample.dimension == 1:
        w, y = _window_weights(sample, cfg, points)
    else:
        w = scaled_weights(cfg.kernel, cfg.h, points, sample.x)
        y = np.broadcast_to(sample.y, w.shape)
    with np.errstate(divide="ignore"):
        terms = cfg.p * np.log(y) + np.log(w)
    terms[w == 0] = NEG_INF
    return w, log_sum_exp_rows(terms)


def estimate_frontier_grid(sample: Sample, cfg: EstimatorConfig, points, gamma: float | None = None) -> GridEstimate:
    """Evaluate the power-kernel estimator (or its gamma-corrected form) at many points."""
    _check(sample, cfg)
    log_c = _log_constant(cfg.p, gamma)
    points = as_point_rows(points, sample.dimension)
    w, log_num = _log_power_sums(sample, cfg, points)
    mass = w.sum(axis=1)
    n_eff = np.count_nonzero(w > 0, axis=1)
    defined = n_eff > 0
    values = np.full(points.shape[0], np.nan)
    with np.errstate(divide="ignore"):
        log_ratio = log_c + log_num[defined] - np.log(mass[defined])
    values[defined] = np.exp(log_ratio / cfg.p)
    if sample.dimension == 1:
        points = points[:, 0]
    return GridEstimate(points, values, n_eff, defined)


def _single(sample: Sample, cfg: EstimatorConfig, x, gamma) -> PointEstimate:
    _check(sample, cfg)
    log_c = _log_constant(cfg.p, gamma)
    w = scaled_weights(cfg.kernel, cfg.h, x, sample.x)[0]
    n_eff = int(np.count_nonzero(w))
    if n_eff == 0:
        return PointEstimate(math.nan, 0, False)
    # points outside the support must not even perturb the rounding
    live = w > 0
    w = w[live]
    power_sum = LogWeightedPowerSum.from_data(sample.y[live], w, cfg.p)
    log_num = power_sum.log_total()
    if log_num == NEG_INF:
        return PointEstimate(0.0, n_eff, True)
    log_ratio = log_c + log_num - math.log(float(w.sum()))
    return PointEstimate(math.exp(log_ratio / cfg.p), n_eff, True)


def estimate_frontier(sample: Sample, cfg: EstimatorConfig, x) -> PointEstimate:
    """Power-transformed kernel regression estimate of the frontier at ``x``."""
    return _single(sample, cfg, x, None)


def estimate_frontier_corrected(sample: Sample, cfg: EstimatorConfig, gamma: float, x) -> PointEstimate:
    """Estimator tuned to the conditional survival ``(1 - y/g(x))**gamma``.

    The constant ``p + 1`` is replaced by ``1 / (gamma * B(1 + p, gamma))``;
    with ``gamma = 1`` it coincides with :func:`estimate_frontier`.
    """
    if not gamma > 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    return _single(sample, cfg, x, gamma)


def f_hat(sample: Sample, cfg: EstimatorConfig, x) -> float:
    """Kernel density estimate ``(1/n) sum_i K_h(x - X_i)``."""
    _check(sample, cfg)
    w = scaled_weights(cfg.kernel, cfg.h, x, sample.x)[0]
    return float(w.sum() / sample.n)


def log_phi_hat(sample: Sample, cfg: EstimatorConfig, x) -> float:
    """Logarithm of :func:`phi_hat`; ``NEG_INF`` when it vanishes."""
    _check(sample, cfg)
    w = scaled_weights(cfg.kernel, cfg.h, x, sample.x)[0]
    log_sum = LogWeightedPowerSum.from_data(sample.y, w, cfg.p).log_total()
    if log_sum == NEG_INF:
        return NEG_INF
    return math.log(cfg.p + 1.0) + log_sum - math.log(sample.n)


def phi_hat(sample: Sample, cfg: EstimatorConfig, x) -> float:
    """``(1/n) sum_i K_h(x - X_i) (p + 1) Y_i**p``; may be ``inf`` for huge ``Y**p``."""
    lv = log_phi_hat(sample, cfg, x)
    if lv == NEG_INF:
        return 0.0
    try:
        return math.exp(lv)
    except OverflowError:
        return math.inf


def r_hat(sample: Sample, cfg: EstimatorConfig, x) -> float:
    """``phi_hat / f_hat``; NaN where ``f_hat`` vanishes."""
    f = f_hat(sample, cfg, x)
    if f == 0:
        return math.nan
    lv = log_phi_hat(sample, cfg, x)
    if lv == NEG_INF:
        return 0.0
    try:
        return math.exp(lv - math.log(f))
    except OverflowError:
        return math.inf


def sigma_hat_inv(sample: Sample, cfg: EstimatorConfig, x) -> float:
    """Plug-in inverse scale ``sqrt((2p+1) n h**d) * sqrt(f_hat(x) / int K^2)``."""
    f = f_hat(sample, cfg, x)
    if not f > 0:
        raise UndefinedBandError(f"no kernel mass at x={x!r}; band undefined")
    return _sigma_inv(cfg, sample.n, f)


def _sigma_inv(cfg: EstimatorConfig, n: int, f):
    d = cfg.kernel.dimension
    return np.sqrt((2.0 * cfg.p + 1.0) * n * cfg.h ** d) * np.sqrt(f / cfg.kernel.l2_moment)


def normal_quantile(level: float) -> float:
    """Two-sided standard normal quantile ``z_{(1 + level)/2}``."""
    if not 0 < level < 1:
        raise DomainError(f"level must lie in (0, 1), got {level}")
    return float(norm.ppf(0.5 * (1.0 + level)))


def confidence_band(sample: Sample, cfg: EstimatorConfig, x, level: float = 0.95) -> ConfidenceBand:
    """Pointwise band for the frontier value g(x) at confidence ``level``."""
    z = normal_quantile(level)
    est = estimate_frontier(sample, cfg, x)
    if not est.defined:
        raise UndefinedBandError(f"estimate undefined at x={x!r}")
    s_inv = sigma_hat_inv(sample, cfg, x)
    return ConfidenceBand(center=est.value, half_width_rel=z / s_inv, level=level)


@dataclass(frozen=True)
class GridBands:
    """Confidence bands over a grid; entries are NaN where the band is undefined."""

    center: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    half_width_rel: np.ndarray
    defined: np.ndarray
    level: float


def confidence_band_grid(sample: Sample, cfg: EstimatorConfig, points, level: float = 0.95) -> GridBands:
    z = normal_quantile(level)
    est = estimate_frontier_grid(sample, cfg, points)
    w, _ = _log_power_sums(sample, cfg, as_point_rows(points, sample.dimension))
    f = w.sum(axis=1) / sample.n
    defined = est.defined & (f > 0)
    hw = np.full(f.shape, np.nan)
    hw[defined] = z / _sigma_inv(cfg, sample.n, f[defined])
    lower = est.values / (1.0 + hw)
    with np.errstate(divide="ignore", invalid="ignore"):
        upper = np.where(hw >= 1.0, np.inf, est.values / (1.0 - hw))
    upper[~defined] = np.nan
    return GridBands(est.values, lower, upper, hw, defined, level)


@dataclass(frozen=True)
class StepFunction:
    """Piecewise-constant frontier on equal cells; ``empty`` flags cells with no data.

    Cells are half-open ``[a_k, a_{k+1})`` except the last, which is closed.
    """

    edges: np.ndarray
    values: np.ndarray
    empty: np.ndarray

    @property
    def n_cells(self) -> int:
        return self.values.shape[0]

    def cell_index(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        lo, hi = self.edges[0], self.edges[-1]
        idx = np.floor((x - lo) / (hi - lo) * self.n_cells).astype(int)
        return np.clip(idx, 0, self.n_cells - 1)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = self.values[self.cell_index(x)]
        outside = (x < self.edges[0]) | (x > self.edges[-1])
        if np.any(outside):
            out = np.where(outside, np.nan, out)
        return out if out.ndim else float(out)


def estimate_geffroy(sample: Sample, n_cells: int, support=(0.0, 1.0)) -> StepFunction:
    """Geffroy's estimator: per-cell maximum of the responses.

    Only one-dimensional covariates are supported. Empty cells get 0.
    """
    if sample.dimension != 1:
        raise DomainError("Geffroy's step estimator is implemented for d = 1 only")
    if int(n_cells) != n_cells or n_cells < 1:
        raise DomainError(f"n_cells must be a positive integer, got {n_cells}")
    lo, hi = map(float, support)
    if not hi > lo:
        raise DomainError(f"support must be a non-empty interval, got {support!r}")
    x = sample.x[:, 0]
    if np.any((x < lo) | (x > hi)):
        raise DomainError(f"sample covariates fall outside the support [{lo}, {hi}]")
    edges = np.linspace(lo, hi, int(n_cells) + 1)
    step = StepFunction(edges, np.zeros(int(n_cells)), np.ones(int(n_cells), dtype=bool))
    idx = step.cell_index(x)
    values = np.zeros(int(n_cells))
    np.maximum.at(values, idx, sample.y)
    empty = np.bincount(idx, minlength=int(n_cells)) == 0
    return StepFunction(edges, values, empty)


def geffroy_cells_for_bandwidth(h: float, support=(0.0, 1.0)) -> int:
    """Default cell count: ``ceil(length / h)``, the resolution of the kernel window."""
    if not h > 0:
        raise DomainError(f"h must be positive, got {h}")
    return max(1, math.ceil((support[1] - support[0]) / h))
