"""Data-generating processes for the Monte Carlo study.

Covariates live on [0, 1] and are either uniform or Beta(2, 2). Given
``X = x`` the response satisfies ``P(Y > y | X = x) = (1 - y/g(x))**gamma``
on ``[0, g(x)]``, sampled by inverting the survival function:
``Y = g(x) * (1 - V**(1/gamma))`` with ``V ~ U(0, 1)``.

Random streams
--------------
All randomness comes from ``numpy.random.Generator(PCG64(seed))``. A
Monte Carlo replication ``r`` uses ``seed = base_seed XOR r`` (see
:func:`replication_seed`). :func:`generate_sample` draws, in order, the
covariate uniforms (``n`` values, or an ``(n, 3)`` block for Beta(2, 2)
stored row by row) followed by ``n`` response uniforms. The sample is
therefore a pure function of ``(model, n)``.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DataError, DomainError
from .estimators import Sample

SEED_MASK = (1 << 64) - 1
_C = math.exp(-5.0 / 12.0)


class Covariate(str, enum.Enum):
    UNIFORM = "uniform"
    BETA22 = "beta22"


def _check_unit(x):
    x = np.asarray(x, dtype=float)
    if np.any(~((x >= 0.0) & (x <= 1.0))):
        raise DomainError("frontier is defined on [0, 1] only")
    return x


def frontier_g1(x):
    """Continuous frontier with kinks at 1/3, 2/3 and 5/6; values in [1, 2]."""
    x = _check_unit(x)
    out = np.select(
        [x <= 1 / 3, x <= 2 / 3, x <= 5 / 6],
        [1.0 + np.exp(-60.0 * (x - 0.25) ** 2), np.full_like(x, 1.0 + _C), 1.0 + 5.0 * _C - 6.0 * _C * x],
        6.0 * x - 4.0,
    )
    return out if out.ndim else float(out)


def frontier_g2(x):
    """Smooth frontier ``(1/10 + sin(pi x)) * (11/10 - exp(-64 (x - 1/2)^2) / 2)``."""
    x = _check_unit(x)
    out = (0.1 + np.sin(np.pi * x)) * (1.1 - 0.5 * np.exp(-64.0 * (x - 0.5) ** 2))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class GridFrontier:
    """User-supplied frontier: linear interpolation between knots, clamped outside."""

    knots_x: tuple
    knots_g: tuple

    def __post_init__(self):
        kx = np.asarray(self.knots_x, dtype=float)
        kg = np.asarray(self.knots_g, dtype=float)
        if kx.ndim != 1 or kx.shape != kg.shape or kx.size < 1:
            raise DomainError("knots must be two 1-D sequences of equal, non-zero length")
        if np.any(np.diff(kx) <= 0):
            raise DomainError("knot abscissae must be strictly increasing")
        if np.any(kg <= 0):
            raise DomainError("frontier values must be strictly positive")
        object.__setattr__(self, "knots_x", tuple(map(float, kx)))
        object.__setattr__(self, "knots_g", tuple(map(float, kg)))

    def __call__(self, x):
        out = np.interp(np.asarray(x, dtype=float), self.knots_x, self.knots_g)
        return out if out.ndim else float(out)


FRONTIERS = {"g1": frontier_g1, "g2": frontier_g2}


@dataclass(frozen=True)
class FrontierModel:
    """Frontier, tail exponent gamma, covariate law and seed of one simulation design."""

    frontier: object = "g2"
    gamma: float = 1.0
    covariate: Covariate = Covariate.UNIFORM
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.frontier, str) and self.frontier not in FRONTIERS:
            raise DomainError(f"unknown frontier {self.frontier!r}; expected g1, g2 or a GridFrontier")
        if not isinstance(self.frontier, (str, GridFrontier)):
            raise DomainError("frontier must be 'g1', 'g2' or a GridFrontier")
        if not self.gamma > 0 or math.isinf(self.gamma):
            raise DomainError(f"gamma must be positive and finite, got {self.gamma}")
        try:
            object.__setattr__(self, "covariate", Covariate(self.covariate))
        except ValueError:
            raise DomainError(f"unknown covariate law {self.covariate!r}") from None
        if int(self.seed) != self.seed or not 0 <= self.seed <= SEED_MASK:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed}")

    def g(self, x):
        if isinstance(self.frontier, GridFrontier):
            return self.frontier(x)
        return FRONTIERS[self.frontier](x)

    def rng(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(int(self.seed)))


def replication_seed(base_seed: int, r: int) -> int:
    """Seed of Monte Carlo replication ``r``: ``base_seed XOR r``."""
    return (int(base_seed) ^ int(r)) & SEED_MASK


def sample_covariate(model: FrontierModel, rng, size=None):
    """Draw covariates; Beta(2, 2) is the median of three uniforms."""
    if model.covariate is Covariate.UNIFORM:
        return rng.random(size) if size is not None else float(rng.random())
    if size is None:
        return float(np.median([rng.random() for _ in range(3)]))
    return np.median(rng.random((size, 3)), axis=1)


def response_from_uniform(model: FrontierModel, x, v):
    """Map ``V ~ U(0, 1)`` to a response with survival ``(1 - y/g(x))**gamma``."""
    v = np.asarray(v, dtype=float)
    return model.g(x) * (1.0 - v ** (1.0 / model.gamma))


def sample_response(model: FrontierModel, x, rng):
    """Draw one response per covariate value in ``x``."""
    x = np.asarray(x, dtype=float)
    v = rng.random(x.shape) if x.ndim else float(rng.random())
    out = response_from_uniform(model, x, v)
    return out if np.ndim(out) else float(out)


def generate_sample(model: FrontierModel, n: int) -> Sample:
    """``n`` i.i.d. pairs from ``model``; deterministic in ``(model, n)``."""
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    rng = model.rng()
    x = sample_covariate(model, rng, int(n))
    y = sample_response(model, x, rng)
    return Sample(x, y)


def write_sample_csv(sample: Sample, path_or_file) -> None:
    """Write a one-dimensional sample as CSV with header ``x,y`` (round-trip precision)."""
    if sample.dimension != 1:
        raise DomainError("CSV export supports one-dimensional covariates only")

    def _write(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y"])
        for xi, yi in zip(sample.x[:, 0], sample.y):
            w.writerow([repr(float(xi)), repr(float(yi))])

    if hasattr(path_or_file, "write"):
        _write(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            _write(fh)


def read_sample_csv(path_or_file) -> Sample:
    """Parse a ``x,y`` CSV. Raises :class:`DataError` with the offending line number."""
    if hasattr(path_or_file, "read"):
        rows = list(csv.reader(path_or_file))
    else:
        with open(path_or_file, newline="") as fh:
            rows = list(csv.reader(fh))
    if not rows:
        raise DataError("empty sample")
    header = [c.strip().lower() for c in rows[0]]
    if header != ["x", "y"]:
        raise DataError(f"expected header 'x,y', got {','.join(rows[0])!r}", line=1)
    xs, ys = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise DataError(f"expected 2 fields, got {len(row)}", line=lineno)
        try:
            xv, yv = float(row[0]), float(row[1])
        except ValueError:
            raise DataError(f"could not parse {','.join(row)!r} as numbers", line=lineno) from None
        if not (math.isfinite(xv) and math.isfinite(yv)):
            raise DataError("non-finite value", line=lineno)
        if yv < 0:
            raise DataError(f"negative response {yv}", line=lineno)
        xs.append(xv)
        ys.append(yv)
    if not xs:
        raise DataError("empty sample")
    return Sample(np.array(xs), np.array(ys))


def survival_levels(sample: Sample, model: FrontierModel, levels: Sequence[float]) -> np.ndarray:
    """Empirical ``P(Y/g(X) > t)`` at each level ``t``."""
    ratio = sample.y / model.g(sample.x[:, 0])
    return np.array([np.mean(ratio > t) for t in levels])
