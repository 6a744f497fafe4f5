"""Anisotropic Lizorkin partition of frequency space.

Level j of the partition tiles the corridor K_j = R_j \\ R_{j-1}, where
R_j = [-2^{ja_1}, 2^{ja_1}) x ... x [-2^{ja_d}, 2^{ja_d}), by the rectangles
R_{j,k} indexed by k in E = {+-1, +-2}^d \\ {+-1}^d. On axis i the entry k_i
selects one of the four half-open intervals

    sgn(k_i) [0, 2^{(j-1)a_i})            if |k_i| = 1
    sgn(k_i) [2^{(j-1)a_i}, 2^{ja_i})     if |k_i| = 2

with cutoff radius 2^{(j-2)a_i} at +-2^{ja_i} and 2^{(j-3)a_i} at 0 and at
+-2^{(j-1)a_i}. The radii agree wherever intervals of the same or of
neighbouring levels share an endpoint.
"""

from __future__ import annotations

import functools
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike

from brushlab.anisotropy import Anisotropy
from brushlab.error import ConstructionError, DomainError

logger = logging.getLogger(__name__)

_RADIUS_SLACK = 1e-12


@dataclass(frozen=True)
class CutoffInterval:
    """Half-open interval [alpha, alpha_prime) with left and right cutoff
    radii eps and eps_prime.

    Raises:
        ConstructionError: If the endpoints are not ordered, a radius is not
            positive or the two radii do not fit in the interval.
    """

    alpha: float
    alpha_prime: float
    eps: float
    eps_prime: float

    def __post_init__(self):
        for name in ("alpha", "alpha_prime", "eps", "eps_prime"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ConstructionError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if not self.alpha < self.alpha_prime:
            raise ConstructionError(
                f"interval endpoints must satisfy alpha < alpha', got [{self.alpha}, {self.alpha_prime})"
            )
        if self.eps <= 0 or self.eps_prime <= 0:
            raise ConstructionError(
                f"cutoff radii must be positive, got {self.eps} and {self.eps_prime}"
            )
        if self.eps + self.eps_prime > self.length * (1 + _RADIUS_SLACK):
            raise ConstructionError(
                f"cutoff radii {self.eps} + {self.eps_prime} exceed the interval length {self.length}"
            )

    @property
    def length(self) -> float:
        return self.alpha_prime - self.alpha

    @property
    def support(self) -> Tuple[float, float]:
        """Closed hull of the support of the bell of this interval."""
        return (self.alpha - self.eps, self.alpha_prime + self.eps_prime)

    @property
    def flat_zone(self) -> Tuple[float, float]:
        return (self.alpha + self.eps, self.alpha_prime - self.eps_prime)

    @property
    def min_radius(self) -> float:
        return min(self.eps, self.eps_prime)

    def contains(self, xi: ArrayLike) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        return (self.alpha <= xi) & (xi < self.alpha_prime)

    def is_compatible_with(self, other: CutoffInterval) -> bool:
        """Reports whether other starts where this interval ends with the
        same cutoff radius."""
        return self.alpha_prime == other.alpha and self.eps_prime == other.eps


def merge(left: CutoffInterval, right: CutoffInterval) -> CutoffInterval:
    """Union of two adjacent compatible intervals, keeping the outer radii."""
    if not left.is_compatible_with(right):
        raise ConstructionError(
            f"intervals {left} and {right} are not adjacent and compatible"
        )
    return CutoffInterval(left.alpha, right.alpha_prime, left.eps, right.eps_prime)


def check_radii(intervals: Iterable[CutoffInterval], c: float) -> None:
    """Validates that every radius is at least c times its interval length
    and that intervals sharing an endpoint share the cutoff radius there.

    Raises:
        ConstructionError: On the first violation found.
    """
    ordered = sorted(intervals, key=lambda interval: interval.alpha)
    for interval in ordered:
        if min(interval.eps, interval.eps_prime) < c * interval.length * (
            1 - _RADIUS_SLACK
        ):
            raise ConstructionError(
                f"cutoff radii of {interval} are smaller than {c} times its length"
            )
    for left, right in zip(ordered, ordered[1:]):
        if left.alpha_prime == right.alpha and left.eps_prime != right.eps:
            raise ConstructionError(
                f"intervals {left} and {right} meet at {right.alpha} with different radii"
            )


def growth_constant(intervals: Sequence[CutoffInterval]) -> float:
    """Largest length ratio between neighbouring intervals of a sorted
    disjoint covering, the constant of its moderate growth condition."""
    ordered = sorted(intervals, key=lambda interval: interval.alpha)
    ratio = 1.0
    for left, right in zip(ordered, ordered[1:]):
        if left.alpha_prime > right.alpha:
            raise ConstructionError(f"intervals {left} and {right} overlap")
        ratio = max(ratio, left.length / right.length, right.length / left.length)
    return ratio


def radius_floor(aniso: Anisotropy) -> float:
    """Constant c with eps >= c |I| for every interval of the partition."""
    return 2.0 ** (-3 * aniso.a_max)


def level_interval(j: int, k_i: int, a_i: float) -> CutoffInterval:
    """Interval of level j selected by the entry k_i in {+-1, +-2}."""
    outer = 2.0 ** (j * a_i)
    middle = 2.0 ** ((j - 1) * a_i)
    wide = 2.0 ** ((j - 2) * a_i)
    narrow = 2.0 ** ((j - 3) * a_i)
    if k_i == 1:
        return CutoffInterval(0.0, middle, narrow, narrow)
    elif k_i == 2:
        return CutoffInterval(middle, outer, narrow, wide)
    elif k_i == -1:
        return CutoffInterval(-middle, 0.0, narrow, narrow)
    elif k_i == -2:
        return CutoffInterval(-outer, -middle, wide, narrow)
    raise DomainError(f"k entries must be in {{-2, -1, 1, 2}}, got {k_i}")


def box_interval(j: int, a_i: float) -> CutoffInterval:
    """Interval [-2^{ja_i}, 2^{ja_i}) with cutoff radius 2^{(j-2)a_i} at both
    ends, the axis factor of the box R_j."""
    outer = 2.0 ** (j * a_i)
    wide = 2.0 ** ((j - 2) * a_i)
    return CutoffInterval(-outer, outer, wide, wide)


def sign_magnitude_vectors(d: int) -> List[Tuple[int, ...]]:
    """The index set E in a fixed order, 4^d - 2^d vectors."""
    return [
        k
        for k in itertools.product((-2, -1, 1, 2), repeat=d)
        if any(abs(v) == 2 for v in k)
    ]


def validate_k(k: Sequence[int], d: int) -> Tuple[int, ...]:
    k = tuple(int(v) for v in k)
    if len(k) != d:
        raise DomainError(f"k has {len(k)} entries, expected {d}")
    if any(v not in (-2, -1, 1, 2) for v in k):
        raise DomainError(f"k entries must be in {{-2, -1, 1, 2}}, got {k}")
    if not any(abs(v) == 2 for v in k):
        raise DomainError(f"k must have an entry of magnitude 2, got {k}")
    return k


@dataclass(frozen=True)
class LizorkinRect:
    """Rectangle R_{j,k} of the Lizorkin partition.

    Attributes:
        j: Level.
        k: Sign/magnitude vector in E.
        intervals: Cutoff interval of each axis.
    """

    j: int
    k: Tuple[int, ...]
    intervals: Tuple[CutoffInterval, ...]

    @property
    def d(self) -> int:
        return len(self.k)

    @property
    def center(self) -> np.ndarray:
        """Center c_{j,k} of the rectangle."""
        return np.array([0.5 * (i.alpha + i.alpha_prime) for i in self.intervals])

    @property
    def lengths(self) -> np.ndarray:
        return np.array([i.length for i in self.intervals])

    @property
    def volume(self) -> float:
        return float(np.prod(self.lengths))

    def scale_factors(self, aniso: Anisotropy) -> np.ndarray:
        """Diagonal of B(k): R = 2^{ja} B(k)([-1, 1)^d) + c_{j,k}."""
        a = aniso.as_array()
        magnitude = np.abs(np.asarray(self.k))
        return np.where(magnitude == 1, 2.0 ** (-(a + 1)), 0.5 * (1 - 2.0 ** (-a)))

    def affine_image(self, u: ArrayLike, aniso: Anisotropy) -> np.ndarray:
        """Maps points of [-1, 1)^d onto the rectangle."""
        dilation = np.power(2.0, self.j * aniso.as_array())
        return dilation * self.scale_factors(aniso) * np.asarray(u) + self.center

    def contains(self, xi: ArrayLike) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        inside = np.ones(xi.shape[:-1], dtype=bool)
        for axis, interval in enumerate(self.intervals):
            inside &= interval.contains(xi[..., axis])
        return inside

    @property
    def support(self) -> Tuple[Tuple[float, float], ...]:
        return tuple(interval.support for interval in self.intervals)


def lizorkin_rect(j: int, k: Sequence[int], aniso: Anisotropy) -> LizorkinRect:
    """Returns R_{j,k} with its cutoff intervals."""
    return _lizorkin_rect(int(j), validate_k(k, aniso.d), aniso)


@functools.lru_cache(maxsize=4096)
def _lizorkin_rect(j: int, k: Tuple[int, ...], aniso: Anisotropy) -> LizorkinRect:
    intervals = tuple(level_interval(j, v, a) for v, a in zip(k, aniso.a))
    return LizorkinRect(j, k, intervals)


def lizorkin_level(j: int, aniso: Anisotropy) -> List[LizorkinRect]:
    """All 4^d - 2^d rectangles of level j.

    Raises:
        ConstructionError: If the radii of the level violate the covering
            conditions, which cannot happen for exponents >= 1.
    """
    rects = [lizorkin_rect(j, k, aniso) for k in sign_magnitude_vectors(aniso.d)]
    c = radius_floor(aniso)
    for axis in range(aniso.d):
        check_radii({rect.intervals[axis] for rect in rects}, c)
    logger.debug("level %d: %d rectangles", j, len(rects))
    return rects


def corridor_contains(xi: ArrayLike, j: int, aniso: Anisotropy) -> np.ndarray:
    """Membership in K_j = R_j \\ R_{j-1}."""
    xi = np.asarray(xi, dtype=float)
    a = aniso.as_array()
    outer = np.power(2.0, j * a)
    inner = np.power(2.0, (j - 1) * a)
    in_box = np.all((-outer <= xi) & (xi < outer), axis=-1)
    in_hole = np.all((-inner <= xi) & (xi < inner), axis=-1)
    return in_box & ~in_hole


def corridor_volume(j: int, aniso: Anisotropy) -> float:
    return 2.0**aniso.d * (2.0 ** (j * aniso.nu) - 2.0 ** ((j - 1) * aniso.nu))


@dataclass(frozen=True)
class UCell:
    """Spatial cell U(R, n) = {y : 2^{ja} y - pi (n + 1/2) in [-1, 1]^d}."""

    j: int
    n: Tuple[int, ...]
    lower: Tuple[float, ...]
    upper: Tuple[float, ...]

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (np.asarray(self.lower) + np.asarray(self.upper))

    @property
    def volume(self) -> float:
        return float(np.prod(np.asarray(self.upper) - np.asarray(self.lower)))

    def contains(self, x: ArrayLike) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.all(
            (np.asarray(self.lower) <= x) & (x <= np.asarray(self.upper)), axis=-1
        )


def u_cell_bounds(
    j: ArrayLike, n: ArrayLike, aniso: Anisotropy
) -> Tuple[np.ndarray, np.ndarray]:
    """Lower and upper corners of U-cells for arrays of levels and
    oscillation indices (n stacked along the last axis)."""
    n = np.asarray(n, dtype=float)
    scale = np.power(2.0, -np.asarray(j, dtype=float)[..., None] * aniso.as_array())
    center = math.pi * (n + 0.5)
    return scale * (center - 1.0), scale * (center + 1.0)


def u_cell(rect: LizorkinRect, n: Sequence[int], aniso: Anisotropy) -> UCell:
    """Returns U(R, n), the box of sides 2 * 2^{-ja_i} centered at
    pi 2^{-ja} (n + 1/2)."""
    n = tuple(int(v) for v in n)
    if len(n) != rect.d or any(v < 0 for v in n):
        raise DomainError(f"n must be a vector of {rect.d} nonnegative integers")
    lower, upper = u_cell_bounds(rect.j, n, aniso)
    return UCell(
        rect.j, n, tuple(float(v) for v in lower), tuple(float(v) for v in upper)
    )


def overlap_count(
    x: ArrayLike, rect: LizorkinRect, n_max: int, aniso: Anisotropy
) -> int:
    """Number of cells U(R, n), n in [0, n_max)^d, containing x."""
    x = np.asarray(x, dtype=float)
    count = 0
    for n in itertools.product(range(n_max), repeat=rect.d):
        if u_cell(rect, n, aniso).contains(x):
            count += 1
    return count
