"""Anisotropic scaling geometry.

An anisotropy is a vector of exponents a = (a_1, ..., a_d) with every
a_i >= 1. It defines the dilations t^a x = (t^{a_1} x_1, ..., t^{a_d} x_d),
the quasi-norm |x|_a which is homogeneous of degree one under them, the
bracket <x> which plays the role of 1 + |x|, and the dyadic rectangles that
tile space at every scale.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Iterator, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike
from scipy import optimize, special

from brushlab.error import DomainError

logger = logging.getLogger(__name__)

QUASI_NORM_RTOL = 1e-12

# Iterations of the vectorized bisection; the bracket spans a factor of at
# most d, so this resolves far below QUASI_NORM_RTOL.
_ARRAY_BISECTION_STEPS = 64


@dataclass(frozen=True)
class Anisotropy:
    """Vector of dilation exponents.

    Attributes:
        a: Exponent of each axis, all finite and >= 1.
    """

    a: Tuple[float, ...]

    def __post_init__(self):
        a = tuple(float(v) for v in self.a)
        if not a:
            raise DomainError("anisotropy needs at least one axis")
        for v in a:
            if not math.isfinite(v) or v < 1:
                raise DomainError(f"anisotropy exponents must be >= 1, got {a}")
        object.__setattr__(self, "a", a)

    @classmethod
    def isotropic(cls, d: int) -> Anisotropy:
        return cls((1.0,) * d)

    @property
    def d(self) -> int:
        return len(self.a)

    @property
    def nu(self) -> float:
        """Homogeneous dimension, the sum of the exponents."""
        return math.fsum(self.a)

    @property
    def a_min(self) -> float:
        return min(self.a)

    @property
    def a_max(self) -> float:
        return max(self.a)

    @property
    def is_isotropic(self) -> bool:
        return all(v == 1.0 for v in self.a)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.a, dtype=float)

    def dilate(self, t: float, x: ArrayLike) -> np.ndarray:
        """Returns t^a x. Works on a point or on an array of points stacked
        along the last axis."""
        return np.power(float(t), self.as_array()) * np.asarray(x, dtype=float)

    def extended(self) -> Anisotropy:
        """Returns the anisotropy (1, a) used to define the bracket."""
        return Anisotropy((1.0,) + self.a)


def _point(x: ArrayLike, aniso: Anisotropy) -> np.ndarray:
    point = np.asarray(x, dtype=float).reshape(-1)
    if point.shape[0] != aniso.d:
        raise DomainError(
            f"point has {point.shape[0]} coordinates, anisotropy has {aniso.d}"
        )
    if not np.all(np.isfinite(point)):
        raise DomainError(f"point must be finite: {point}")
    return point


def quasi_norm(x: ArrayLike, aniso: Anisotropy) -> float:
    """Anisotropic quasi-norm |x|_a.

    Returns the unique t > 0 with |t^{-a} x| = 1, found by bisection on the
    strictly decreasing map t -> |t^{-a} x|^2 - 1. The bracket is
    [m / sqrt(d), sqrt(d) m] with m = max_i |x_i|^{1/a_i}.

    Raises:
        DomainError: If x is not a finite point of the right dimension.
    """
    point = _point(x, aniso)
    magnitudes = np.abs(point)
    nonzero = np.flatnonzero(magnitudes)
    if nonzero.size == 0:
        return 0.0
    if aniso.is_isotropic:
        return math.hypot(*point)
    if nonzero.size == 1:
        i = int(nonzero[0])
        return float(magnitudes[i] ** (1.0 / aniso.a[i]))

    squares = [float(v) ** 2 for v in magnitudes[nonzero]]
    exponents = [2.0 * aniso.a[i] for i in nonzero]

    def excess(t: float) -> float:
        return math.fsum(s * t ** (-e) for s, e in zip(squares, exponents)) - 1.0

    m = max(float(magnitudes[i]) ** (1.0 / aniso.a[i]) for i in nonzero)
    root = math.sqrt(aniso.d)
    return float(
        optimize.bisect(
            excess,
            m / root,
            m * root,
            xtol=m * QUASI_NORM_RTOL * 1e-3,
            rtol=QUASI_NORM_RTOL,
            maxiter=200,
        )
    )


def quasi_norms(points: ArrayLike, aniso: Anisotropy) -> np.ndarray:
    """Quasi-norms of an array of points stacked along the last axis.

    Vectorized bisection on the same bracket as quasi_norm; the result has
    the shape of points without its last axis.
    """
    x = np.asarray(points, dtype=float)
    if x.shape[-1] != aniso.d:
        raise DomainError(
            f"points have {x.shape[-1]} coordinates, anisotropy has {aniso.d}"
        )
    if not np.all(np.isfinite(x)):
        raise DomainError("points must be finite")
    a = aniso.as_array()
    if aniso.is_isotropic:
        return np.linalg.norm(x, axis=-1)

    squares = x**2
    m = np.max(np.abs(x) ** (1.0 / a), axis=-1)
    zero = m == 0
    scale = np.where(zero, 1.0, m)
    root = math.sqrt(aniso.d)
    lo = scale / root
    hi = scale * root
    for _ in range(_ARRAY_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        value = np.sum(squares * mid[..., None] ** (-2.0 * a), axis=-1)
        above = value > 1.0
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    return np.where(zero, 0.0, 0.5 * (lo + hi))


def bracket(x: ArrayLike, aniso: Anisotropy) -> float:
    """Anisotropic bracket <x>, the (1, a)-quasi-norm of (1, x)."""
    point = _point(x, aniso)
    return quasi_norm(np.concatenate(([1.0], point)), aniso.extended())


def brackets(points: ArrayLike, aniso: Anisotropy) -> np.ndarray:
    """Vectorized bracket over points stacked along the last axis."""
    x = np.asarray(points, dtype=float)
    ones = np.ones(x.shape[:-1] + (1,))
    return quasi_norms(np.concatenate((ones, x), axis=-1), aniso.extended())


def ball_contains(
    x: ArrayLike, center: ArrayLike, radius: float, aniso: Anisotropy
) -> bool:
    """Membership in the anisotropic ball {y : |y - center|_a < radius}."""
    return quasi_norm(_point(x, aniso) - _point(center, aniso), aniso) < radius


def ball_volume(radius: float, aniso: Anisotropy) -> float:
    """Volume of an anisotropic ball of the given radius.

    The unit anisotropic ball is the Euclidean unit ball, and the ball of
    radius r is its dilate r^a B, hence the volume omega_d r^nu.
    """
    if radius < 0:
        raise DomainError(f"radius must be nonnegative, got {radius}")
    d = aniso.d
    unit = math.pi ** (d / 2) / special.gamma(d / 2 + 1)
    return float(unit * radius**aniso.nu)


@dataclass(frozen=True)
class DyadicRect:
    """Dyadic rectangle Q_{jk} = 2^{-ja}([0, 1)^d + k)."""

    j: int
    k: Tuple[int, ...]
    aniso: Anisotropy

    @property
    def sides(self) -> np.ndarray:
        return np.power(2.0, -self.j * self.aniso.as_array())

    @property
    def lower(self) -> np.ndarray:
        return self.sides * np.asarray(self.k, dtype=float)

    @property
    def upper(self) -> np.ndarray:
        return self.sides * (np.asarray(self.k, dtype=float) + 1.0)

    @property
    def volume(self) -> float:
        return 2.0 ** (-self.aniso.nu * self.j)

    def contains(self, x: ArrayLike) -> bool:
        point = _point(x, self.aniso)
        return bool(np.all(self.lower <= point) and np.all(point < self.upper))


def dyadic_rect_of_point(x: ArrayLike, j: int, aniso: Anisotropy) -> DyadicRect:
    """Returns the dyadic rectangle of level j containing x."""
    point = _point(x, aniso)
    k = np.floor(np.power(2.0, j * aniso.as_array()) * point).astype(int)
    return DyadicRect(j, tuple(int(v) for v in k), aniso)


def dyadic_rects_meeting(
    lower: Sequence[float], upper: Sequence[float], j: int, aniso: Anisotropy
) -> Iterator[DyadicRect]:
    """Enumerates the dyadic rectangles of level j meeting the box
    [lower, upper)."""
    scale = np.power(2.0, j * aniso.as_array())
    first = np.floor(scale * np.asarray(lower, dtype=float)).astype(int)
    last = np.ceil(scale * np.asarray(upper, dtype=float)).astype(int)
    ranges = [range(int(f), int(l)) for f, l in zip(first, last)]
    for k in itertools.product(*ranges):
        yield DyadicRect(j, tuple(k), aniso)
