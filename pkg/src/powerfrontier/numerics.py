"""Special functions and overflow-safe summation primitives.

Everything here is a pure function. The log-beta function is built on
``math.lgamma`` only, so the correction constant of the gamma-corrected
estimator stays finite even for the large, non-integral powers used by the
simulation rules (p = sqrt(n)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError

#: Value of the logarithm of an empty sum. Kept as a named constant so that
#: callers compare against it explicitly instead of testing for ``-inf``.
NEG_INF = float("-inf")


def _stirling_tail(x: float) -> float:
    """``lgamma(x) - ((x - 1/2) log x - x + log(2 pi)/2)``; truncation < 1e-16 for x >= 10."""
    inv = 1.0 / x
    z = inv * inv
    series = 1 / 156 - z * 3617 / 122400
    series = 691 / 360360 - z * series
    series = 1 / 1188 - z * series
    series = 1 / 1680 - z * series
    series = 1 / 1260 - z * series
    series = 1 / 360 - z * series
    return inv * (1 / 12 - z * series)


_STIRLING_MIN = 10.0


def log_beta(a: float, b: float) -> float:
    """Return ``log B(a, b)`` for positive ``a`` and ``b``.

    Computed as ``lgamma(a) + lgamma(b) - lgamma(a + b)``. When the larger
    argument is 10 or more, the difference ``lgamma(big) - lgamma(big +
    small)`` is expanded with the Stirling series so that it does not cancel
    catastrophically.
    """
    if not (a > 0 and b > 0) or math.isinf(a) or math.isinf(b):
        raise DomainError(f"log_beta needs finite a > 0 and b > 0, got ({a}, {b})")
    big, small = (a, b) if a >= b else (b, a)
    if big < _STIRLING_MIN:
        return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    total = big + small
    diff = (
        -(big - 0.5) * math.log1p(small / big)
        - small * math.log(total)
        + small
        + (_stirling_tail(big) - _stirling_tail(total))
    )
    return math.lgamma(small) + diff


def log_sum_exp(terms: Sequence[float]) -> float:
    """Return ``log(sum(exp(t) for t in terms))`` using a max shift.

    An empty sequence, or one whose terms are all ``NEG_INF``, gives ``NEG_INF``.
    """
    arr = np.asarray(terms, dtype=float).ravel()
    if arr.size == 0:
        return NEG_INF
    if arr.size == 1:
        return float(arr[0])
    shift = float(arr.max())
    if shift == NEG_INF:
        return NEG_INF
    if math.isinf(shift):
        return shift
    return shift + math.log(float(np.exp(arr - shift).sum()))


def log_sum_exp_rows(matrix: np.ndarray) -> np.ndarray:
    """Row-wise :func:`log_sum_exp` of a 2-D array; empty rows map to ``NEG_INF``."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2:
        raise DomainError("log_sum_exp_rows expects a 2-D array")
    out = np.full(matrix.shape[0], NEG_INF)
    if matrix.shape[1] == 0:
        return out
    shift = matrix.max(axis=1)
    live = np.isfinite(shift)
    if live.any():
        rows = matrix[live] - shift[live, None]
        out[live] = shift[live] + np.log(np.exp(rows).sum(axis=1))
    # +inf rows can only come from an infinite input term
    out[shift == np.inf] = np.inf
    return out


@dataclass(frozen=True)
class LogWeightedPowerSum:
    """``sum_i w_i * y_i**p`` held as log-terms ``p*log(y_i) + log(w_i)``.

    Terms with ``w_i == 0`` or ``y_i == 0`` are ``NEG_INF``. ``shift`` is the
    largest log-term, so ``exp(log_terms - shift)`` lies in ``[0, 1]``.
    """

    log_terms: np.ndarray
    shift: float = field(init=False)

    def __post_init__(self):
        terms = np.asarray(self.log_terms, dtype=float).ravel()
        terms.setflags(write=False)
        object.__setattr__(self, "log_terms", terms)
        object.__setattr__(self, "shift", float(terms.max()) if terms.size else NEG_INF)

    @classmethod
    def from_data(cls, y, w, p: float) -> "LogWeightedPowerSum":
        y = np.asarray(y, dtype=float)
        w = np.asarray(w, dtype=float)
        if y.shape != w.shape:
            raise DomainError("responses and weights must have the same shape")
        if np.any(y < 0) or np.any(w < 0):
            raise DomainError("responses and weights must be non-negative")
        with np.errstate(divide="ignore"):
            terms = p * np.log(y) + np.log(w)
        # 0 * log(0) cannot arise (p >= 1), but w == 0 with y == inf could
        terms[w == 0] = NEG_INF
        return cls(terms)

    def scaled(self) -> np.ndarray:
        """Terms relative to the largest one, each in ``[0, 1]``."""
        if self.shift == NEG_INF:
            return np.zeros_like(self.log_terms)
        return np.exp(self.log_terms - self.shift)

    @property
    def is_empty(self) -> bool:
        return self.shift == NEG_INF

    def log_total(self) -> float:
        if self.is_empty:
            return NEG_INF
        return self.shift + math.log(float(self.scaled().sum()))


def check_power_inequality_i(u: float, p: float) -> bool:
    """Check ``|(1+u)**p - 1| <= 2*p*|u|`` under ``p >= 1`` and ``p*|u| <= ln 2``."""
    if not p >= 1:
        raise DomainError(f"p must be >= 1, got {p}")
    if p * abs(u) > math.log(2.0):
        raise DomainError(f"p*|u| = {p * abs(u)} exceeds ln 2")
    lhs = abs(math.expm1(p * math.log1p(u)))
    return lhs <= 2.0 * p * abs(u) + 1e-12


def check_root_inequality_ii(u: float, p: float, C: float = 2.0) -> bool:
    """Check ``|(1+u)**(1/p) - 1 - u/p| <= (C/p) * u**2`` for ``|u| < 1/2``."""
    if not abs(u) < 0.5:
        raise DomainError(f"|u| must be < 1/2, got {u}")
    if not p >= 1:
        raise DomainError(f"p must be >= 1, got {p}")
    if not C >= 2:
        raise DomainError(f"C must be >= 2, got {C}")
    lhs = abs(math.expm1(math.log1p(u) / p) - u / p)
    return lhs <= (C / p) * u * u + 1e-12


def sample_stddev(values) -> float:
    """Square root of the unbiased (n - 1) sample variance."""
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size < 2:
        raise DomainError("sample_stddev needs at least 2 values")
    return float(np.std(arr, ddof=1))
