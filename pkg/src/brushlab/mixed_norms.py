"""Mixed Lebesgue norms, iterated maximal functions and the discrete
Triebel-Lizorkin and Besov norms of brushlet coefficients.

Every function handled here is piecewise constant on a product of cells:
a :class:`GridFunction` stores the cell edges of each axis and one value per
cell. Integrals are therefore exact sums, and maximal functions are suprema
over windows whose endpoints are cell edges.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike

from brushlab.anisotropy import Anisotropy, brackets
from brushlab.brushlet import BrushletIndex, brushlet_time, sign_vectors
from brushlab.covering import u_cell_bounds
from brushlab.error import DomainError
from brushlab.transform import CoefficientSet

logger = logging.getLogger(__name__)


def _exponent(value: float, name: str) -> float:
    value = float(value)
    if math.isnan(value) or value <= 0:
        raise DomainError(f"{name} must be in (0, inf], got {value}")
    return value


@dataclass(frozen=True)
class MixedNormParams:
    """Parameters of the sequence norms.

    Attributes:
        p: Integrability exponent of each axis, in (0, inf].
        q: Summability exponent, in (0, inf].
        s: Smoothness, any real.
        aniso: Anisotropy of the underlying covering.
    """

    p: Tuple[float, ...]
    q: float
    s: float
    aniso: Anisotropy

    def __post_init__(self):
        p = tuple(_exponent(v, "p") for v in self.p)
        if len(p) != self.aniso.d:
            raise DomainError(f"p has {len(p)} entries, anisotropy has {self.aniso.d}")
        s = float(self.s)
        if not math.isfinite(s):
            raise DomainError(f"s must be finite, got {s}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", _exponent(self.q, "q"))
        object.__setattr__(self, "s", s)

    @property
    def p_min(self) -> float:
        return min(self.p)

    @property
    def p_max(self) -> float:
        return max(self.p)

    @property
    def is_unmixed(self) -> bool:
        return len(set(self.p)) == 1

    def with_(self, **changes) -> MixedNormParams:
        fields = dict(p=self.p, q=self.q, s=self.s, aniso=self.aniso)
        fields.update(changes)
        return MixedNormParams(**fields)


@dataclass(frozen=True)
class GridFunction:
    """Piecewise constant function on a product of cells, zero outside.

    Attributes:
        edges: Strictly increasing cell edges of each axis.
        values: One value per cell, of shape (len(edges[i]) - 1, ...).
    """

    edges: Tuple[np.ndarray, ...]
    values: np.ndarray

    def __post_init__(self):
        edges = tuple(np.asarray(e, dtype=float) for e in self.edges)
        for e in edges:
            if e.ndim != 1 or len(e) < 2 or not np.all(np.diff(e) > 0):
                raise DomainError("cell edges must be strictly increasing")
        values = np.asarray(self.values)
        if values.shape != tuple(len(e) - 1 for e in edges):
            raise DomainError(
                f"values of shape {values.shape} do not fit edges {[len(e) for e in edges]}"
            )
        if not np.all(np.isfinite(values)):
            raise DomainError("grid function values must be finite")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "values", values)

    @property
    def d(self) -> int:
        return len(self.edges)

    def widths(self, axis: int) -> np.ndarray:
        return np.diff(self.edges[axis])

    def cell_volumes(self) -> np.ndarray:
        volume = np.ones(self.values.shape)
        for axis in range(self.d):
            shape = [1] * self.d
            shape[axis] = -1
            volume = volume * self.widths(axis).reshape(shape)
        return volume

    def centers(self) -> np.ndarray:
        """Cell midpoints stacked along the last axis."""
        mids = [0.5 * (e[1:] + e[:-1]) for e in self.edges]
        return np.stack(np.meshgrid(*mids, indexing="ij"), axis=-1)

    def cell_index(self, points: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
        """Cell of each point (half-open cells, the last one closed) and a
        mask of the points inside the grid."""
        points = np.asarray(points, dtype=float)
        index = []
        inside = np.ones(points.shape[:-1], dtype=bool)
        for axis, e in enumerate(self.edges):
            x = points[..., axis]
            i = np.searchsorted(e, x, side="right") - 1
            i = np.where(x == e[-1], len(e) - 2, i)
            inside &= (i >= 0) & (i < len(e) - 1)
            index.append(np.clip(i, 0, len(e) - 2))
        return np.stack(index, axis=-1), inside

    def evaluate(self, points: ArrayLike) -> np.ndarray:
        index, inside = self.cell_index(points)
        values = self.values[tuple(np.moveaxis(index, -1, 0))]
        return np.where(inside, values, 0)

    def on_edges(self, edges: Sequence[np.ndarray]) -> GridFunction:
        """The same function on a refinement of the cells."""
        refined = tuple(
            np.unique(np.concatenate((np.asarray(new, dtype=float), old)))
            for new, old in zip(edges, self.edges)
        )
        mids = [0.5 * (e[1:] + e[:-1]) for e in refined]
        points = np.stack(np.meshgrid(*mids, indexing="ij"), axis=-1)
        return GridFunction(refined, self.evaluate(points))

    def with_values(self, values: np.ndarray) -> GridFunction:
        return GridFunction(self.edges, values)


def mixed_lp(f: GridFunction, p: Sequence[float]) -> float:
    """Mixed norm with exponent p_i on axis i, innermost axis first.

    Each cell is integrated exactly; p_i = inf takes the maximum along
    axis i.
    """
    p = [_exponent(v, "p") for v in p]
    if len(p) != f.d:
        raise DomainError(f"p has {len(p)} entries, function has {f.d} axes")
    v = np.abs(f.values).astype(float)
    for axis, exponent in enumerate(p):
        if exponent == math.inf:
            v = np.max(v, axis=0)
            continue
        w = f.widths(axis).reshape((-1,) + (1,) * (v.ndim - 1))
        v = np.sum(v**exponent * w, axis=0) ** (1.0 / exponent)
    return float(v)


def lq_combine(values: Sequence[np.ndarray], q: float) -> np.ndarray:
    """Pointwise l_q norm of a family of arrays."""
    q = _exponent(q, "q")
    stacked = np.abs(np.stack([np.asarray(v) for v in values]))
    if q == math.inf:
        return np.max(stacked, axis=0)
    return np.sum(stacked**q, axis=0) ** (1.0 / q)


def vector_lq_norm(
    family: Sequence[GridFunction], p: Sequence[float], q: float
) -> float:
    """||{f_j}||_{L_p(l_q)}: pointwise l_q over the family, then mixed_lp.

    Raises:
        DomainError: If the family is empty or its members do not share
            their cell edges.
    """
    if not family:
        raise DomainError("vector norm of an empty family")
    first = family[0]
    for f in family[1:]:
        if f.d != first.d or not all(
            len(e1) == len(e2) and np.array_equal(e1, e2)
            for e1, e2 in zip(f.edges, first.edges)
        ):
            raise DomainError("family members must share their cell edges")
    return mixed_lp(first.with_values(lq_combine([f.values for f in family], q)), p)


def _window_averages(slice_values: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """A[a, b, ...] = average of the slices over [edges[a], edges[b]] for
    a < b, -inf elsewhere."""
    widths = np.diff(edges).reshape((-1,) + (1,) * (slice_values.ndim - 1))
    cumulative = np.concatenate(
        (np.zeros((1,) + slice_values.shape[1:]), np.cumsum(slice_values * widths, axis=0))
    )
    span = edges[None, :] - edges[:, None]
    upper = span > 0
    extra = (1,) * (slice_values.ndim - 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        averages = (cumulative[None, :] - cumulative[:, None]) / np.where(
            upper, span, 1.0
        ).reshape(span.shape + extra)
    return np.where(upper.reshape(span.shape + extra), averages, -np.inf)


def maximal_1d(f: GridFunction, axis: int, x: ArrayLike) -> float:
    """One-dimensional maximal function of |f| along axis at the point x.

    The supremum runs over the windows containing x_axis whose endpoints are
    cell edges; when x_axis lies outside the grid it is added as an endpoint.
    The other coordinates of x select the slice.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (f.d,):
        raise DomainError(f"x must have {f.d} coordinates")
    if not 0 <= axis < f.d:
        raise DomainError(f"axis {axis} out of range for {f.d} axes")
    index, _ = f.cell_index(x)
    for k in range(f.d):
        e = f.edges[k]
        if k != axis and not e[0] <= x[k] <= e[-1]:
            return 0.0
    selector = tuple(slice(None) if k == axis else int(index[k]) for k in range(f.d))
    values = np.abs(f.values[selector]).astype(float)
    edges = f.edges[axis]
    t = float(x[axis])
    if t < edges[0]:
        edges = np.concatenate(([t], edges))
        values = np.concatenate(([0.0], values))
    elif t > edges[-1]:
        edges = np.concatenate((edges, [t]))
        values = np.concatenate((values, [0.0]))
    averages = _window_averages(values, edges)
    contains = (edges[:, None] <= t) & (edges[None, :] >= t)
    return float(np.max(np.where(contains, averages, -np.inf)))


def _maximal_along_first_axis(values: np.ndarray, edges: np.ndarray) -> np.ndarray:
    averages = _window_averages(values, edges)
    # suffix max over the right endpoint, then prefix max over the left one
    suffix = np.flip(np.maximum.accumulate(np.flip(averages, axis=1), axis=1), axis=1)
    prefix = np.maximum.accumulate(suffix, axis=0)
    cells = np.arange(len(edges) - 1)
    return prefix[cells, cells + 1]


def iterated_maximal(f: GridFunction, theta: float = 1.0) -> GridFunction:
    """Iterated maximal function (M_d ... M_1 |f|^theta)^{1/theta}.

    On each cell M_i takes the supremum of the averages along axis i over
    the windows with edge endpoints containing that cell.

    Raises:
        DomainError: If theta <= 0.
    """
    theta = float(theta)
    if not theta > 0:
        raise DomainError(f"theta must be positive, got {theta}")
    v = np.abs(f.values).astype(float) ** theta
    for axis in range(f.d):
        moved = np.moveaxis(v, axis, 0)
        v = np.moveaxis(_maximal_along_first_axis(moved, f.edges[axis]), 0, axis)
    return f.with_values(v ** (1.0 / theta))


def single_term_weight(idx: BrushletIndex, c: complex, params: MixedNormParams) -> float:
    """|R|^{s/nu} |c| |R|^{1/2}, the height of the normalized indicator of a
    single coefficient."""
    volume = idx.rect(params.aniso).volume
    return volume ** (params.s / params.aniso.nu) * abs(c) * math.sqrt(volume)


def single_term_norm(idx: BrushletIndex, c: complex, params: MixedNormParams) -> float:
    """Closed form of the f and b norms of a single coefficient:
    |R|^{s/nu} |c| |R|^{1/2} prod_i (2 * 2^{-j a_i})^{1/p_i}."""
    value = single_term_weight(idx, c, params)
    for a_i, p_i in zip(params.aniso.a, params.p):
        if p_i != math.inf:
            value *= (2.0 * 2.0 ** (-idx.j * a_i)) ** (1.0 / p_i)
    return value


def _boxes(
    coeffs: CoefficientSet, params: MixedNormParams
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    indices = coeffs.indices()
    levels = np.array([idx.j for idx in indices], dtype=float)
    n = np.array([idx.n for idx in indices], dtype=float)
    lower, upper = u_cell_bounds(levels, n, params.aniso)
    weights = np.array(
        [single_term_weight(idx, coeffs[idx], params) for idx in indices]
    )
    return lower, upper, weights


def arrangement(
    lower: np.ndarray, upper: np.ndarray, weights: np.ndarray, q: float
) -> GridFunction:
    """Pointwise l_q norm of the weighted box indicators, exactly, on the
    product of the sorted box edges of each axis."""
    q = _exponent(q, "q")
    d = lower.shape[1]
    edges = tuple(np.unique(np.concatenate((lower[:, i], upper[:, i]))) for i in range(d))
    first = np.stack(
        [np.searchsorted(edges[i], lower[:, i]) for i in range(d)], axis=1
    )
    last = np.stack(
        [np.searchsorted(edges[i], upper[:, i]) for i in range(d)], axis=1
    )
    accumulator = np.zeros(tuple(len(e) - 1 for e in edges))
    for lo, hi, w in zip(first, last, weights):
        box = tuple(slice(int(a), int(b)) for a, b in zip(lo, hi))
        if q == math.inf:
            np.maximum(accumulator[box], w, out=accumulator[box])
        else:
            accumulator[box] += w**q
    if q != math.inf:
        accumulator = accumulator ** (1.0 / q)
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(
            "arrangement of %d boxes has %d cells", len(weights), accumulator.size
        )
    return GridFunction(edges, accumulator)


def f_norm(coeffs: CoefficientSet, params: MixedNormParams) -> float:
    """Discrete Triebel-Lizorkin norm

        || (sum_R sum_n (|R|^{s/nu} |c_{n,R}| |R|^{1/2} 1_{U(R,n)})^q)^{1/q} ||_{L_p}

    computed exactly on the arrangement of the cells U(R, n).
    """
    if len(coeffs) == 0:
        return 0.0
    _check_dimension(coeffs, params)
    lower, upper, weights = _boxes(coeffs, params)
    return mixed_lp(arrangement(lower, upper, weights, params.q), params.p)


def b_norm(coeffs: CoefficientSet, params: MixedNormParams) -> float:
    """Discrete Besov norm: the l_q norm over rectangles R of

        || sum_n |R|^{s/nu} |c_{n,R}| |R|^{1/2} 1_{U(R,n)} ||_{L_p}.
    """
    if len(coeffs) == 0:
        return 0.0
    _check_dimension(coeffs, params)
    per_rect = []
    for indices in coeffs.by_rect().values():
        lower, upper, weights = _boxes(coeffs.restrict(indices), params)
        # cells of one rectangle are disjoint, so any q gives the sum
        per_rect.append(mixed_lp(arrangement(lower, upper, weights, 1.0), params.p))
    return _lq(per_rect, params.q)


def _check_dimension(coeffs: CoefficientSet, params: MixedNormParams) -> None:
    d = coeffs.indices()[0].d
    if d != params.aniso.d:
        raise DomainError(f"coefficients have {d} axes, parameters have {params.aniso.d}")


def _lq(values: Sequence[float], q: float) -> float:
    values = np.abs(np.asarray(values, dtype=float))
    if q == math.inf:
        return float(np.max(values))
    return float(np.sum(values**q) ** (1.0 / q))


def sequence_norm(coeffs: CoefficientSet, params: MixedNormParams, kind: str = "f") -> float:
    if kind == "f":
        return f_norm(coeffs, params)
    if kind == "b":
        return b_norm(coeffs, params)
    raise DomainError(f"unknown norm kind {kind!r}")


def fefferman_stein_ratio(
    family: Sequence[GridFunction], theta: float, p: Sequence[float], q: float
) -> float:
    """||{M_theta f_j}||_{L_p(l_q)} / ||{f_j}||_{L_p(l_q)}.

    Raises:
        DomainError: If the family has zero norm.
    """
    denominator = vector_lq_norm(family, p, q)
    if denominator == 0:
        raise DomainError("family has zero norm")
    maximal = [iterated_maximal(f, theta) for f in family]
    return vector_lq_norm(maximal, p, q) / denominator


def peetre_constant(
    f: GridFunction, j: int, aniso: Anisotropy, theta: float = 1.0
) -> float:
    """Smallest c with

        sup_y |f(y)| / <2^{ja}(x - y)>^{nu/theta} <= c M_theta f(x)

    over the cell centers x, y of the grid.
    """
    centers = f.centers().reshape(-1, f.d)
    values = np.abs(f.values).reshape(-1).astype(float)
    maximal = iterated_maximal(f, theta).values.reshape(-1)
    scale = np.power(2.0, j * aniso.as_array())
    exponent = aniso.nu / theta
    constant = 0.0
    for x, m in zip(centers, maximal):
        if m == 0:
            continue
        weights = brackets(scale * (x - centers), aniso) ** exponent
        constant = max(constant, float(np.max(values / weights)) / m)
    return constant


def maxbound_ratio(
    coeffs: CoefficientSet,
    aniso: Anisotropy,
    points: ArrayLike,
    r: float = 1.0,
    tolerance: float = 1e-9,
) -> float:
    """Largest ratio over the points of

        sum_n |s_{n,R}| |w_{n,R}(x)|
        / (|R|^{1/2} sum_m M_r(sum_n |s_{n,R}| 1_{U(R,n)})(U_m x))

    for coefficients of a single rectangle R.

    Raises:
        DomainError: If the coefficients span several rectangles, or r is
            outside (0, 1].
    """
    groups = coeffs.by_rect()
    if len(groups) != 1:
        raise DomainError("coefficients must belong to exactly one rectangle")
    if not 0 < r <= 1:
        raise DomainError(f"r must be in (0, 1], got {r}")
    points = np.asarray(points, dtype=float).reshape(-1, aniso.d)
    indices = coeffs.indices()
    rect = indices[0].rect(aniso)
    lower, upper, _ = _boxes(coeffs, MixedNormParams((1.0,) * aniso.d, 1.0, 0.0, aniso))
    g = arrangement(lower, upper, np.abs([coeffs[i] for i in indices]), 1.0)

    signs = sign_vectors(aniso.d)
    reflected = (signs[:, None, :] * points[None, :, :]).reshape(-1, aniso.d)
    edges = []
    for axis in range(aniso.d):
        coords = np.concatenate((g.edges[axis], reflected[:, axis]))
        pad = max(1.0, float(np.ptp(coords)))
        edges.append(np.unique(np.concatenate((coords, [coords.min() - pad, coords.max() + pad]))))
    maximal = iterated_maximal(g.on_edges(edges), r)
    rhs = math.sqrt(rect.volume) * maximal.evaluate(reflected).reshape(
        len(signs), len(points)
    ).sum(axis=0)

    lhs = np.zeros(len(points))
    for idx in indices:
        lhs += abs(coeffs[idx]) * np.abs(
            brushlet_time(idx, aniso, points, tolerance=tolerance)
        )
    if np.any((rhs == 0) & (lhs > 0)):
        return math.inf
    positive = rhs > 0
    return float(np.max(lhs[positive] / rhs[positive], initial=0.0))
