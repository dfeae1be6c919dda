"""Compactly supported kernels on the unit ball of R^d.

Every kernel is radial: ``K(t) = c * k(|t|)`` for ``|t| <= 1`` and zero
outside, where ``k`` is the family profile and ``c`` normalises the density
to unit mass over the ball. In dimension one the cosine-squared kernel is
exactly ``cos^2(pi t / 2)`` on ``[-1, 1]`` (``c = 1``). For ``d > 1`` the
radial extension is one admissible choice among several; it keeps the
support equal to the ball, which a product kernel would not.

The uniform and Epanechnikov families exist because their moments are easy
to check by hand. The uniform kernel is not Lipschitz, so its
``lipschitz`` constant is ``inf``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainError


class KernelFamily(str, enum.Enum):
    COSINE2 = "cosine2"
    EPANECHNIKOV = "epanechnikov"
    UNIFORM = "uniform"


def _profile(family: KernelFamily, r):
    r = np.asarray(r, dtype=float)
    if family is KernelFamily.COSINE2:
        return np.cos(0.5 * np.pi * r) ** 2
    if family is KernelFamily.EPANECHNIKOV:
        return 1.0 - r * r
    return np.ones_like(r)


# max |k'(r)| on [0, 1]; None means k jumps at the boundary
_PROFILE_SLOPE = {
    KernelFamily.COSINE2: math.pi / 2,
    KernelFamily.EPANECHNIKOV: 2.0,
    KernelFamily.UNIFORM: None,
}


def _sphere_area(d: int) -> float:
    """Surface area of the unit sphere in R^d (2 for d = 1)."""
    return 2.0 * math.pi ** (d / 2) / math.gamma(d / 2)


def _radial_integral(family: KernelFamily, d: int, q: int, scale: float = 1.0) -> float:
    """Integral over the unit ball of ``(scale * k(|t|))**q``."""
    val, _ = integrate.quad(
        lambda r: (scale * float(_profile(family, r))) ** q * r ** (d - 1),
        0.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200,
    )
    return _sphere_area(d) * val


@dataclass(frozen=True)
class KernelSpec:
    """A radial kernel density on the unit ball, with cached moment constants.

    Build with :func:`make_kernel`; the constants are filled in there.
    """

    dimension: int
    family: KernelFamily
    normalizer: float
    l2_moment: float
    l3_moment: float
    lipschitz: float

    def __call__(self, t) -> np.ndarray:
        return kernel_values(self, t)


def make_kernel(family="cosine2", dimension: int = 1) -> KernelSpec:
    """Construct a :class:`KernelSpec` by family name or enum."""
    try:
        family = KernelFamily(family)
    except ValueError:
        names = ", ".join(f.value for f in KernelFamily)
        raise DomainError(f"unknown kernel family {family!r}; expected one of {names}") from None
    if int(dimension) != dimension or dimension < 1:
        raise DomainError(f"dimension must be a positive integer, got {dimension}")
    dimension = int(dimension)
    normalizer = 1.0 / _radial_integral(family, dimension, 1)
    slope = _PROFILE_SLOPE[family]
    return KernelSpec(
        dimension=dimension,
        family=family,
        normalizer=normalizer,
        l2_moment=_radial_integral(family, dimension, 2, normalizer),
        l3_moment=_radial_integral(family, dimension, 3, normalizer),
        lipschitz=math.inf if slope is None else normalizer * slope,
    )


def as_point_rows(a, dimension: int) -> np.ndarray:
    """Coerce ``a`` to an ``(m, dimension)`` array of points."""
    a = np.asarray(a, dtype=float)
    if dimension == 1:
        if a.ndim == 2 and a.shape[1] != 1:
            raise DomainError(f"expected points of dimension 1, got shape {a.shape}")
        return a.reshape(-1, 1)
    a = np.atleast_2d(a)
    if a.ndim != 2 or a.shape[1] != dimension:
        raise DomainError(f"expected points of dimension {dimension}, got shape {a.shape}")
    return a


def kernel_values(spec: KernelSpec, t) -> np.ndarray:
    """Vectorised ``K(t)``.

    For d = 1 ``t`` is read elementwise; for d > 1 its trailing axis holds
    the coordinates.
    """
    t = np.asarray(t, dtype=float)
    if spec.dimension == 1:
        r = np.abs(t)
    else:
        if t.ndim == 0 or t.shape[-1] != spec.dimension:
            raise DomainError(f"kernel has dimension {spec.dimension}, got shape {t.shape}")
        r = np.sqrt(np.sum(t * t, axis=-1))
    inside = r <= 1.0
    return np.where(inside, spec.normalizer * _profile(spec.family, np.minimum(r, 1.0)), 0.0)


def kernel_eval(spec: KernelSpec, t) -> float:
    """``K(t)`` at a single point."""
    t = np.asarray(t, dtype=float)
    if spec.dimension > 1 and t.shape != (spec.dimension,):
        raise DomainError(f"expected a {spec.dimension}-vector, got shape {t.shape}")
    if spec.dimension == 1 and t.size != 1:
        raise DomainError(f"expected a scalar or 1-vector, got shape {t.shape}")
    return float(kernel_values(spec, t.reshape(spec.dimension)[0] if spec.dimension == 1 else t))


def kernel_scaled_eval(spec: KernelSpec, h: float, v) -> float:
    """``K_h(v) = K(v / h) / h**d``."""
    if not h > 0:
        raise DomainError(f"bandwidth must be positive, got {h}")
    v = np.asarray(v, dtype=float)
    return kernel_eval(spec, v / h) / h ** spec.dimension


def scaled_weights(spec: KernelSpec, h: float, x, X) -> np.ndarray:
    """Matrix of ``K_h(x_j - X_i)`` with shape ``(len(x), len(X))``.

    ``x`` holds evaluation points and ``X`` sample covariates, both either
    1-D (d = 1) or of shape ``(m, d)``.
    """
    if not h > 0:
        raise DomainError(f"bandwidth must be positive, got {h}")
    x = as_point_rows(x, spec.dimension)
    X = as_point_rows(X, spec.dimension)
    if spec.dimension == 1:
        diffs = (x[:, 0, None] - X[None, :, 0]) / h
    else:
        diffs = (x[:, None, :] - X[None, :, :]) / h
    return kernel_values(spec, diffs) / h ** spec.dimension


def kernel_l2_moment(spec: KernelSpec) -> float:
    """``integral over the unit ball of K^2``."""
    return spec.l2_moment


def kernel_l3_moment(spec: KernelSpec) -> float:
    return spec.l3_moment
