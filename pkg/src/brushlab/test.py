"""Helpers for testing code built on brushlab.

The brute force norms below sample the sequence norm integrands on fixed
grids built from the truncation alone and sum them directly, without the
arrangement of :mod:`brushlab.mixed_norms`. They are meant for small
coefficient sets.
"""

import json
import math
import os
from typing import Any, Dict, Sequence, Tuple

import numpy as np

from brushlab.anisotropy import Anisotropy
from brushlab.brushlet import BrushletIndex
from brushlab.mixed_norms import MixedNormParams
from brushlab.transform import CoefficientSet, Truncation

__all__ = [
    "assert_close",
    "brute_force_norm",
    "coefficient_set",
    "quadrature_grid",
    "write_config",
]


def coefficient_set(
    values: Dict[Tuple[int, Tuple[int, ...], Tuple[int, ...]], complex],
    truncation: Truncation = Truncation(-2, 2, 8),
) -> CoefficientSet:
    """Builds a coefficient set from {(j, k, n): value}."""
    return CoefficientSet(
        {BrushletIndex(j, k, n): c for (j, k, n), c in values.items()}, truncation
    )


def write_config(directory: str, name: str = "config.json", **values: Any) -> str:
    """Writes a JSON configuration and returns its path."""
    path = os.path.join(directory, name)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(values, f)
    return path


def _height(idx: BrushletIndex, c: complex, params: MixedNormParams) -> float:
    volume = 1.0
    for k_i, a_i in zip(idx.k, params.aniso.a):
        outer = 2.0 ** (idx.j * a_i)
        inner = 2.0 ** ((idx.j - 1) * a_i)
        volume *= inner if abs(k_i) == 1 else outer - inner
    return volume ** (params.s / params.aniso.nu) * abs(c) * math.sqrt(volume)


def quadrature_grid(truncation: Truncation, a_i: float, refinement: int = 4) -> np.ndarray:
    """Nodes of one axis containing every U-cell edge the truncation admits,
    each gap between consecutive edges split into refinement equal parts.

    The grid depends on the truncation only, so midpoint quadrature on it is
    exact for every coefficient set of that truncation.
    """
    edges = set()
    for j in truncation.levels:
        side = 2.0 ** (-j * a_i)
        for n in range(truncation.n_max):
            center = math.pi * (n + 0.5) * side
            edges.update((center - side, center + side))
    ordered = sorted(edges)
    parts = [
        np.linspace(lo, hi, refinement + 1)[:-1] for lo, hi in zip(ordered, ordered[1:])
    ]
    return np.append(np.concatenate(parts), ordered[-1])


def _indicator(idx: BrushletIndex, aniso: Anisotropy, points: np.ndarray) -> np.ndarray:
    # U(R, n) = {y : 2^{ja} y - pi (n + 1/2) in [-1, 1]^d}
    inside = np.ones(points.shape[:-1], dtype=bool)
    for axis, (n_i, a_i) in enumerate(zip(idx.n, aniso.a)):
        u = 2.0 ** (idx.j * a_i) * points[..., axis] - math.pi * (n_i + 0.5)
        inside &= np.abs(u) <= 1.0
    return inside


def _integrate(
    coeffs: CoefficientSet, params: MixedNormParams, q: float, refinement: int
) -> float:
    aniso = params.aniso
    grids = [quadrature_grid(coeffs.truncation, a_i, refinement) for a_i in aniso.a]
    mids = [0.5 * (g[1:] + g[:-1]) for g in grids]
    points = np.stack(np.meshgrid(*mids, indexing="ij"), axis=-1)
    terms = [
        _height(idx, coeffs[idx], params) * _indicator(idx, aniso, points)
        for idx in coeffs.indices()
    ]
    if q == math.inf:
        values = np.max(terms, axis=0)
    else:
        values = np.sum(np.power(terms, q), axis=0) ** (1.0 / q)
    # innermost axis first
    for grid, p in zip(grids, params.p):
        if p == math.inf:
            values = np.max(values, axis=0)
            continue
        widths = np.diff(grid).reshape((-1,) + (1,) * (values.ndim - 1))
        values = np.sum(values**p * widths, axis=0) ** (1.0 / p)
    return float(values)


def brute_force_norm(
    coeffs: CoefficientSet,
    params: MixedNormParams,
    kind: str = "f",
    refinement: int = 4,
) -> float:
    """Sequence norm of a small coefficient set by midpoint quadrature of the
    iterated L_p(l_q) expression on the grids of :func:`quadrature_grid`."""
    if len(coeffs) == 0:
        return 0.0
    if kind == "f":
        return _integrate(coeffs, params, params.q, refinement)
    per_rect = [
        _integrate(coeffs.restrict(group), params, 1.0, refinement)
        for group in coeffs.by_rect().values()
    ]
    if params.q == math.inf:
        return max(per_rect)
    return sum(v**params.q for v in per_rect) ** (1.0 / params.q)


def assert_close(actual: Sequence[float], expected: Sequence[float], rtol: float = 1e-9):
    np.testing.assert_allclose(np.asarray(actual), np.asarray(expected), rtol=rtol)
