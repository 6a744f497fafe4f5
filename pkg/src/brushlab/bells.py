"""Ramp, bell and central bell functions and the interval projections.

The ramp is the fixed smooth function

    rho(xi) = sin(pi/4 (1 + eta(xi)))

where eta is an odd C-infinity transition equal to -1 below -1 and to 1
above 1, built from h(t) = exp(-1/t). Oddness of eta gives
rho(xi)^2 + rho(-xi)^2 = 1 for every xi.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from numpy.typing import ArrayLike

from brushlab import quadrature
from brushlab.covering import CutoffInterval
from brushlab.error import DomainError
from brushlab.spectrum import SampledSpectrum

logger = logging.getLogger(__name__)

_INV_SQRT_2PI = 1.0 / math.sqrt(2 * math.pi)

# Rows of the x by node phase matrix evaluated at once.
_CHUNK = 512


def _h(t: np.ndarray) -> np.ndarray:
    positive = t > 0
    return np.where(positive, np.exp(-1.0 / np.where(positive, t, 1.0)), 0.0)


def _transition(t: np.ndarray) -> np.ndarray:
    """Smooth step from 0 at t <= 0 to 1 at t >= 1, with g(1 - t) = 1 - g(t)."""
    t = np.clip(t, 0.0, 1.0)
    left = _h(t)
    right = _h(1.0 - t)
    return left / (left + right)


def ramp(xi: ArrayLike) -> np.ndarray:
    """Evaluates the ramp rho."""
    xi = np.asarray(xi, dtype=float)
    eta = 2.0 * _transition(0.5 * (xi + 1.0)) - 1.0
    return np.sin(0.25 * math.pi * (1.0 + eta))


def ramp_eval(xi: float) -> float:
    return float(ramp(xi))


@dataclass(frozen=True)
class BellFunction:
    """Bell b_I of a cutoff interval.

    The bell is supported in [alpha - eps, alpha' + eps'] and identically 1 on
    [alpha + eps, alpha' - eps'].
    """

    interval: CutoffInterval

    def __call__(self, xi: ArrayLike) -> np.ndarray:
        i = self.interval
        xi = np.asarray(xi, dtype=float)
        return ramp((xi - i.alpha) / i.eps) * ramp((i.alpha_prime - xi) / i.eps_prime)


def bell_eval(bell: BellFunction, xi: float) -> float:
    return float(bell(xi))


def central_bell_hat(interval: CutoffInterval, xi: ArrayLike) -> np.ndarray:
    """g^_I(xi) = rho(|I| xi / eps) rho(|I| (1 - xi) / eps'), so that
    b_I(xi) = g^_I((xi - alpha) / |I|)."""
    xi = np.asarray(xi, dtype=float)
    length = interval.length
    return ramp(length * xi / interval.eps) * ramp(
        length * (1.0 - xi) / interval.eps_prime
    )


def central_bell_hat_eval(interval: CutoffInterval, xi: float) -> float:
    return float(central_bell_hat(interval, xi))


def central_bell_support(interval: CutoffInterval) -> Tuple[float, float]:
    length = interval.length
    return (-interval.eps / length, 1.0 + interval.eps_prime / length)


def central_bell_time(
    interval: CutoffInterval,
    x: ArrayLike,
    quad_resolution: Optional[int] = None,
    tolerance: float = quadrature.DEFAULT_TOLERANCE,
) -> np.ndarray:
    """g_I(x) = (2 pi)^{-1/2} int g^_I(xi) e^{i x xi} d xi.

    Args:
        interval: Interval whose central bell is transformed.
        x: Points of evaluation.
        quad_resolution: Number of trapezoid intervals over the support of
            g^_I. Defaults to a count resolving the cutoff transitions and the
            oscillation of e^{i x xi} at the largest |x|.
        tolerance: Absolute tolerance of the halved-step verification.

    Raises:
        AccuracyError: If the quadrature fails its verification.
    """
    x = np.asarray(x, dtype=float)
    lo, hi = central_bell_support(interval)
    if quad_resolution is None:
        step = quadrature.step_for(
            interval.min_radius / interval.length,
            max_frequency=float(np.max(np.abs(x), initial=0.0)),
        )
    else:
        if quad_resolution < 2:
            raise DomainError(f"quad_resolution must be >= 2, got {quad_resolution}")
        step = (hi - lo) / quad_resolution
    grid = quadrature.nodes(lo, hi, step)
    samples = central_bell_hat(interval, grid)
    fine_w, coarse_w = quadrature.paired_weights(grid)

    flat = x.reshape(-1)
    fine = np.empty(flat.shape, dtype=complex)
    coarse = np.empty(flat.shape, dtype=complex)
    for start in range(0, len(flat), _CHUNK):
        phases = np.exp(1j * np.outer(flat[start : start + _CHUNK], grid))
        fine[start : start + _CHUNK] = phases @ (fine_w * samples)
        coarse[start : start + _CHUNK] = phases @ (coarse_w * samples)
    quadrature.verify(fine, coarse, tolerance, f"central bell of {interval}")
    return (_INV_SQRT_2PI * fine).reshape(x.shape)


def central_bell_time_eval(
    interval: CutoffInterval,
    x: float,
    quad_resolution: Optional[int] = None,
    tolerance: float = quadrature.DEFAULT_TOLERANCE,
) -> complex:
    return complex(central_bell_time(interval, x, quad_resolution, tolerance))


def _reflection(grid: np.ndarray, targets: np.ndarray, needed: np.ndarray) -> np.ndarray:
    index = np.clip(np.searchsorted(grid, targets), 0, len(grid) - 1)
    left = np.clip(index - 1, 0, len(grid) - 1)
    closer = np.abs(grid[left] - targets) < np.abs(grid[index] - targets)
    index = np.where(closer, left, index)
    atol = 1e-9 * np.maximum(1.0, np.abs(targets))
    missing = needed & (np.abs(grid[index] - targets) > atol)
    if np.any(missing):
        raise DomainError(
            f"grid has no node at the reflected frequency {float(targets[missing][0])}"
        )
    return np.where(needed, index, 0)


@dataclass(frozen=True)
class IntervalProjection:
    """Operator P_I on one axis of a grid, stored as three diagonals.

    P_I f^(xi) = b(xi) [b(xi) f^(xi) + b(2 alpha - xi) f^(2 alpha - xi)
                         - b(2 alpha' - xi) f^(2 alpha' - xi)]
    """

    direct: np.ndarray
    left_weight: np.ndarray
    left_index: np.ndarray
    right_weight: np.ndarray
    right_index: np.ndarray

    @classmethod
    def on_grid(cls, grid: np.ndarray, interval: CutoffInterval) -> IntervalProjection:
        """Raises:
        DomainError: If the grid misses the bell support or a reflected node.
        """
        grid = np.asarray(grid, dtype=float)
        lo, hi = interval.support
        if grid[0] > lo or grid[-1] < hi:
            raise DomainError(
                f"grid [{grid[0]}, {grid[-1]}] does not cover the bell support [{lo}, {hi}]"
            )
        bell = BellFunction(interval)
        b = bell(grid)
        a, a_prime = interval.alpha, interval.alpha_prime
        left = 2 * a - grid
        right = 2 * a_prime - grid
        left_needed = np.abs(grid - a) < interval.eps
        right_needed = np.abs(grid - a_prime) < interval.eps_prime
        left_index = _reflection(grid, left, left_needed)
        right_index = _reflection(grid, right, right_needed)
        return cls(
            direct=b * b,
            left_weight=np.where(left_needed, b * bell(left), 0.0),
            left_index=left_index,
            right_weight=np.where(right_needed, -b * bell(right), 0.0),
            right_index=right_index,
        )

    def apply(self, values: np.ndarray, axis: int = 0) -> np.ndarray:
        values = np.moveaxis(np.asarray(values, dtype=complex), axis, -1)
        result = (
            self.direct * values
            + self.left_weight * np.take(values, self.left_index, axis=-1)
            + self.right_weight * np.take(values, self.right_index, axis=-1)
        )
        return np.moveaxis(result, -1, axis)


def project_interval(
    spectrum: SampledSpectrum, interval: CutoffInterval, axis: int = 0
) -> SampledSpectrum:
    """Applies P_I along one axis of a sampled spectrum.

    Raises:
        DomainError: If the grid of that axis does not contain the reflected
            nodes the projection needs.
    """
    projection = IntervalProjection.on_grid(spectrum.grids[axis], interval)
    return spectrum.with_values(projection.apply(spectrum.values, axis))
