"""Tensor product brushlets.

The univariate brushlet of oscillation n on a cutoff interval I is

    w^_{n,I}(xi) = sqrt(2/|I|) b_I(xi) cos(pi (n + 1/2) (xi - alpha) / |I|)

and the brushlet w_{n,R} of a rectangle R = I_1 x ... x I_d is the tensor
product of its axis factors. In space each factor is the pair of humps

    w_{n,I}(x) = sqrt(|I|/2) e^{i alpha x} [g_I(|I|(x + e)) + g_I(|I|(x - e))]

with e = pi (n + 1/2) / |I|.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike

from brushlab import quadrature
from brushlab.anisotropy import Anisotropy
from brushlab.bells import BellFunction, IntervalProjection, central_bell_time
from brushlab.covering import (
    CutoffInterval,
    LizorkinRect,
    lizorkin_rect,
    validate_k,
)
from brushlab.error import DomainError
from brushlab.spectrum import SampledSpectrum

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class BrushletIndex:
    """Index (n, j, k) of the brushlet w_{n,R_{j,k}}.

    Instances order lexicographically by (j, k, n).
    """

    j: int
    k: Tuple[int, ...]
    n: Tuple[int, ...]

    def __post_init__(self):
        k = validate_k(self.k, len(self.k))
        n = tuple(int(v) for v in self.n)
        if len(n) != len(k):
            raise DomainError(f"n has {len(n)} entries, k has {len(k)}")
        if any(v < 0 for v in n):
            raise DomainError(f"oscillation indices must be nonnegative, got {n}")
        object.__setattr__(self, "j", int(self.j))
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "n", n)

    @property
    def d(self) -> int:
        return len(self.k)

    def rect(self, aniso: Anisotropy) -> LizorkinRect:
        return lizorkin_rect(self.j, self.k, aniso)


def brushlet_hat_1d(n: int, interval: CutoffInterval, xi: ArrayLike) -> np.ndarray:
    """Univariate brushlet in frequency."""
    xi = np.asarray(xi, dtype=float)
    length = interval.length
    return (
        math.sqrt(2.0 / length)
        * BellFunction(interval)(xi)
        * np.cos(math.pi * (n + 0.5) * (xi - interval.alpha) / length)
    )


def brushlet_hat(idx: BrushletIndex, aniso: Anisotropy, xi: ArrayLike) -> np.ndarray:
    """Tensor brushlet in frequency at points stacked along the last axis."""
    xi = np.asarray(xi, dtype=float)
    rect = idx.rect(aniso)
    value = np.ones(xi.shape[:-1])
    for axis, (n, interval) in enumerate(zip(idx.n, rect.intervals)):
        value = value * brushlet_hat_1d(n, interval, xi[..., axis])
    return value


def hump_offset(n: int, interval: CutoffInterval) -> float:
    """Distance e_{n,I} of the two humps from the origin."""
    return math.pi * (n + 0.5) / interval.length


def brushlet_time_1d(
    n: int,
    interval: CutoffInterval,
    x: ArrayLike,
    quad_resolution: Optional[int] = None,
    tolerance: float = quadrature.DEFAULT_TOLERANCE,
) -> np.ndarray:
    """Univariate brushlet in space from the two-hump representation."""
    x = np.asarray(x, dtype=float)
    length = interval.length
    e = hump_offset(n, interval)
    both = central_bell_time(
        interval,
        np.stack((length * (x + e), length * (x - e))),
        quad_resolution,
        tolerance,
    )
    return math.sqrt(length / 2) * np.exp(1j * interval.alpha * x) * (both[0] + both[1])


def brushlet_time(
    idx: BrushletIndex,
    aniso: Anisotropy,
    x: ArrayLike,
    quad_resolution: Optional[int] = None,
    tolerance: float = quadrature.DEFAULT_TOLERANCE,
) -> np.ndarray:
    """Tensor brushlet in space at points stacked along the last axis.

    Raises:
        AccuracyError: If a central bell quadrature fails its verification.
    """
    x = np.asarray(x, dtype=float)
    rect = idx.rect(aniso)
    value = np.ones(x.shape[:-1], dtype=complex)
    for axis, (n, interval) in enumerate(zip(idx.n, rect.intervals)):
        value = value * brushlet_time_1d(
            n, interval, x[..., axis], quad_resolution, tolerance
        )
    return value


def sign_vectors(d: int) -> np.ndarray:
    """The 2^d vectors of {-1, 1}^d, each exactly once."""
    return np.array(list(itertools.product((-1.0, 1.0), repeat=d)))


@dataclass(frozen=True)
class HumpFrame:
    """Scale matrix and hump centers of one brushlet.

    Attributes:
        delta: Diagonal of the scale matrix, the interval lengths.
        offsets: The vector e_{n,R} of hump offsets.
        signs: Sign vectors v_m of the matrices U_m = diag(v_m).
    """

    delta: np.ndarray
    offsets: np.ndarray
    signs: np.ndarray = field(repr=False)

    @property
    def centers(self) -> np.ndarray:
        """Points U_m e_{n,R}, one row per sign vector."""
        return self.signs * self.offsets

    @classmethod
    def of(cls, idx: BrushletIndex, aniso: Anisotropy) -> HumpFrame:
        rect = idx.rect(aniso)
        return cls(
            delta=rect.lengths,
            offsets=np.array(
                [hump_offset(n, i) for n, i in zip(idx.n, rect.intervals)]
            ),
            signs=sign_vectors(idx.d),
        )


def hump_kernel(
    rect: LizorkinRect,
    y: ArrayLike,
    quad_resolution: Optional[int] = None,
    tolerance: float = quadrature.DEFAULT_TOLERANCE,
) -> np.ndarray:
    """G_R(y), the tensor product of the central bells of the rectangle."""
    y = np.asarray(y, dtype=float)
    value = np.ones(y.shape[:-1], dtype=complex)
    for axis, interval in enumerate(rect.intervals):
        value = value * central_bell_time(
            interval, y[..., axis], quad_resolution, tolerance
        )
    return value


def hump_bound(
    idx: BrushletIndex,
    aniso: Anisotropy,
    x: ArrayLike,
    quad_resolution: Optional[int] = None,
    tolerance: float = quadrature.DEFAULT_TOLERANCE,
) -> np.ndarray:
    """2^{-d} |R|^{1/2} sum_m |G_R(Delta (x + U_m e_{n,R}))|."""
    x = np.asarray(x, dtype=float)
    rect = idx.rect(aniso)
    frame = HumpFrame.of(idx, aniso)
    total = np.zeros(x.shape[:-1])
    for center in frame.centers:
        total += np.abs(
            hump_kernel(rect, frame.delta * (x + center), quad_resolution, tolerance)
        )
    return 2.0 ** (-idx.d) * math.sqrt(rect.volume) * total


def project_rect(spectrum: SampledSpectrum, rect: LizorkinRect) -> SampledSpectrum:
    """Applies P_R = P_{I_1} x ... x P_{I_d} to a sampled spectrum.

    Raises:
        DomainError: If a grid axis lacks nodes the projections need.
    """
    if spectrum.d != rect.d:
        raise DomainError(f"spectrum has {spectrum.d} axes, rectangle has {rect.d}")
    values = spectrum.values
    for axis, interval in enumerate(rect.intervals):
        projection = IntervalProjection.on_grid(spectrum.grids[axis], interval)
        values = projection.apply(values, axis)
    return spectrum.with_values(values)


def indices_in(
    rects: Sequence[LizorkinRect], n_max: int
) -> List[BrushletIndex]:
    """All indices of the given rectangles with n in [0, n_max)^d."""
    indices = []
    for rect in rects:
        for n in itertools.product(range(n_max), repeat=rect.d):
            indices.append(BrushletIndex(rect.j, rect.k, n))
    return indices
