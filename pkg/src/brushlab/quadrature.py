"""Composite trapezoid rule with halved-step verification.

Every integrand handled by brushlab is smooth and vanishes to infinite order
at the ends of its support, where the trapezoid rule converges faster than
any power of the step. Each result is checked against the same rule on every
other node; a disagreement above the tolerance raises AccuracyError.
"""

import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy import integrate

from brushlab.error import AccuracyError, DomainError

logger = logging.getLogger(__name__)

NODES_PER_RADIUS = 40
SAMPLES_PER_PERIOD = 8
DEFAULT_TOLERANCE = 1e-9


def step_for(
    min_radius: float,
    nodes_per_radius: int = NODES_PER_RADIUS,
    max_frequency: float = 0.0,
) -> float:
    """Largest step resolving cutoff transitions of the given radius and
    sampling oscillations up to max_frequency (radians per unit) at
    SAMPLES_PER_PERIOD points per period."""
    if min_radius <= 0 or nodes_per_radius <= 0:
        raise DomainError("radius and node density must be positive")
    step = min_radius / nodes_per_radius
    if max_frequency > 0:
        step = min(step, 2 * math.pi / (SAMPLES_PER_PERIOD * max_frequency))
    return step


def nodes(lo: float, hi: float, step: float) -> np.ndarray:
    """Uniform nodes on [lo, hi] with an even number of intervals of length
    at most step."""
    if not hi > lo:
        raise DomainError(f"empty integration range [{lo}, {hi}]")
    intervals = 2 * max(1, math.ceil((hi - lo) / (2 * step)))
    return np.linspace(lo, hi, intervals + 1)


def weights(grid: np.ndarray) -> np.ndarray:
    """Trapezoid weights of a uniform grid."""
    h = (grid[-1] - grid[0]) / (len(grid) - 1)
    w = np.full(len(grid), h)
    w[0] = w[-1] = 0.5 * h
    return w


def verify(fine: np.ndarray, coarse: np.ndarray, tolerance: float, what: str) -> None:
    """Raises AccuracyError when fine and coarse estimates disagree."""
    error = float(np.max(np.abs(np.asarray(fine) - np.asarray(coarse)), initial=0.0))
    if error > tolerance:
        raise AccuracyError(
            f"{what}: halving the step changed the result by {error:.3e} > {tolerance:.3e}"
        )
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug("%s: halved-step difference %.3e", what, error)


def trapezoid(
    values: np.ndarray,
    grid: np.ndarray,
    axis: int = -1,
    tolerance: Optional[float] = DEFAULT_TOLERANCE,
    what: str = "trapezoid",
) -> np.ndarray:
    """Trapezoid integral of samples along axis, verified on every other
    node unless tolerance is None."""
    values = np.asarray(values)
    fine = integrate.trapezoid(values, grid, axis=axis)
    if tolerance is not None:
        coarse = integrate.trapezoid(
            np.take(values, np.arange(0, values.shape[axis], 2), axis=axis),
            grid[::2],
            axis=axis,
        )
        verify(fine, coarse, tolerance, what)
    return fine


def paired_weights(grid: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Trapezoid weights of the grid and of its every-other-node subgrid,
    the latter zero on the skipped nodes."""
    fine = weights(grid)
    coarse = np.zeros_like(fine)
    coarse[::2] = weights(grid[::2])
    return fine, coarse
