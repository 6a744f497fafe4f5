"""Functions sampled on tensor grids in frequency."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, Tuple

import numpy as np
from typing_extensions import TypeAlias

from brushlab.error import DomainError

logger = logging.getLogger(__name__)

SpectrumProvider: TypeAlias = Callable[[np.ndarray], np.ndarray]
"""A spectrum provider maps an array of frequencies stacked along the last
axis to the complex values of f^ at those frequencies."""

_NODE_ATOL = 1e-9


@dataclass(frozen=True)
class SampledSpectrum:
    """Values of f^ on a tensor grid.

    Attributes:
        grids: Strictly increasing frequency nodes of each axis.
        values: Complex samples, one axis per grid.
    """

    grids: Tuple[np.ndarray, ...]
    values: np.ndarray

    def __post_init__(self):
        grids = tuple(np.asarray(g, dtype=float) for g in self.grids)
        for g in grids:
            if g.ndim != 1 or len(g) < 2 or not np.all(np.diff(g) > 0):
                raise DomainError("grid nodes must be strictly increasing")
        values = np.asarray(self.values, dtype=complex)
        if values.shape != tuple(len(g) for g in grids):
            raise DomainError(
                f"values of shape {values.shape} do not match the grid {tuple(len(g) for g in grids)}"
            )
        object.__setattr__(self, "grids", grids)
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, grids: Sequence[np.ndarray]) -> SampledSpectrum:
        return cls(tuple(grids), np.zeros(tuple(len(g) for g in grids), dtype=complex))

    @classmethod
    def sample(
        cls, grids: Sequence[np.ndarray], provider: SpectrumProvider
    ) -> SampledSpectrum:
        return cls(tuple(grids), provider(mesh(grids)))

    @property
    def d(self) -> int:
        return len(self.grids)

    def with_values(self, values: np.ndarray) -> SampledSpectrum:
        return SampledSpectrum(self.grids, values)

    def sup_distance(self, other: SampledSpectrum) -> float:
        return float(np.max(np.abs(self.values - other.values), initial=0.0))


def mesh(grids: Sequence[np.ndarray]) -> np.ndarray:
    """Tensor grid points stacked along the last axis."""
    return np.stack(np.meshgrid(*grids, indexing="ij"), axis=-1)


def symmetric_grid(
    lo: float, hi: float, step: float, anchors: Iterable[float] = ()
) -> np.ndarray:
    """Nodes step * Z inside [lo, hi].

    Every anchor must be an integer multiple of the step, which makes the
    grid invariant under the reflections xi -> 2 anchor - xi as far as the
    range allows.

    Raises:
        DomainError: If an anchor is not on the lattice.
    """
    if step <= 0:
        raise DomainError(f"grid step must be positive, got {step}")
    for anchor in anchors:
        ratio = anchor / step
        if not math.isclose(ratio, round(ratio), rel_tol=0, abs_tol=_NODE_ATOL):
            raise DomainError(
                f"anchor {anchor} is not a multiple of the grid step {step}"
            )
    first = math.ceil(lo / step - _NODE_ATOL)
    last = math.floor(hi / step + _NODE_ATOL)
    return np.arange(first, last + 1) * step


def dyadic_step(target: float) -> float:
    """Largest power of two not exceeding target."""
    if target <= 0:
        raise DomainError(f"step must be positive, got {target}")
    return 2.0 ** math.floor(math.log2(target))
