"""Analysis, synthesis, Gram matrices and completeness checks of the
brushlet system, plus the admissible pair of the anisotropic
Littlewood-Paley decomposition.

All inner products are computed on the frequency side, where every brushlet
is real and compactly supported. Integrals use the trapezoid rule on grids
resolving the cutoff transitions and the cosine oscillations, verified on
every other node.
"""

from __future__ import annotations

import logging
import math
import string
from dataclasses import dataclass, field
from typing import (
    Callable,
    Dict,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
)

import numpy as np
from numpy.typing import ArrayLike

from brushlab import quadrature
from brushlab.anisotropy import Anisotropy, quasi_norms
from brushlab.bells import BellFunction, IntervalProjection
from brushlab.brushlet import BrushletIndex, brushlet_hat_1d
from brushlab.covering import (
    CutoffInterval,
    LizorkinRect,
    box_interval,
    lizorkin_level,
    lizorkin_rect,
)
from brushlab.error import DomainError
from brushlab.spectrum import (
    SampledSpectrum,
    SpectrumProvider,
    dyadic_step,
    mesh,
    symmetric_grid,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Truncation:
    """Finite part of the index set: levels j_min..j_max and oscillation
    indices n with 0 <= n_i < n_max."""

    j_min: int
    j_max: int
    n_max: int

    def __post_init__(self):
        if self.j_min > self.j_max:
            raise DomainError(f"empty level range {self.j_min}..{self.j_max}")
        if self.n_max < 1:
            raise DomainError(f"n_max must be positive, got {self.n_max}")

    @property
    def levels(self) -> range:
        return range(self.j_min, self.j_max + 1)

    def admits(self, idx: BrushletIndex) -> bool:
        return self.j_min <= idx.j <= self.j_max and all(
            0 <= v < self.n_max for v in idx.n
        )

    def rects(self, aniso: Anisotropy) -> List[LizorkinRect]:
        return [rect for j in self.levels for rect in lizorkin_level(j, aniso)]


@dataclass(frozen=True)
class CoefficientSet:
    """Finite map from brushlet indices to complex coefficients.

    Raises:
        DomainError: If an index lies outside the truncation.
    """

    coefficients: Mapping[BrushletIndex, complex]
    truncation: Truncation

    def __post_init__(self):
        coefficients: Dict[BrushletIndex, complex] = {}
        for idx, value in self.coefficients.items():
            if not self.truncation.admits(idx):
                raise DomainError(f"{idx} lies outside {self.truncation}")
            value = complex(value)
            if not (math.isfinite(value.real) and math.isfinite(value.imag)):
                raise DomainError(f"coefficient of {idx} is not finite")
            coefficients[idx] = value
        object.__setattr__(self, "coefficients", coefficients)

    def __len__(self) -> int:
        return len(self.coefficients)

    def __iter__(self) -> Iterator[BrushletIndex]:
        return iter(self.indices())

    def __getitem__(self, idx: BrushletIndex) -> complex:
        return self.coefficients[idx]

    def indices(self) -> List[BrushletIndex]:
        """Indices in lexicographic (j, k, n) order."""
        return sorted(self.coefficients)

    def items(self) -> List[Tuple[BrushletIndex, complex]]:
        return [(idx, self.coefficients[idx]) for idx in self.indices()]

    def restrict(self, keep: Iterable[BrushletIndex]) -> CoefficientSet:
        return CoefficientSet({idx: self.coefficients[idx] for idx in keep}, self.truncation)

    def without(self, drop: Iterable[BrushletIndex]) -> CoefficientSet:
        dropped = set(drop)
        return CoefficientSet(
            {i: c for i, c in self.coefficients.items() if i not in dropped},
            self.truncation,
        )

    def scaled(self, factor: complex) -> CoefficientSet:
        return CoefficientSet(
            {i: factor * c for i, c in self.coefficients.items()}, self.truncation
        )

    def combine(
        self, other: CoefficientSet, alpha: complex = 1, beta: complex = 1
    ) -> CoefficientSet:
        """alpha * self + beta * other on the union of the supports."""
        keys = set(self.coefficients) | set(other.coefficients)
        return CoefficientSet(
            {
                i: alpha * self.coefficients.get(i, 0) + beta * other.coefficients.get(i, 0)
                for i in keys
            },
            self.truncation,
        )

    def energy(self) -> float:
        return float(sum(abs(c) ** 2 for c in self.coefficients.values()))

    def by_rect(self) -> Dict[Tuple[int, Tuple[int, ...]], List[BrushletIndex]]:
        groups: Dict[Tuple[int, Tuple[int, ...]], List[BrushletIndex]] = {}
        for idx in self.indices():
            groups.setdefault((idx.j, idx.k), []).append(idx)
        return groups


def rect_grid(
    interval: CutoffInterval,
    n_max: int,
    nodes_per_radius: int = quadrature.NODES_PER_RADIUS,
) -> np.ndarray:
    """Quadrature nodes on the bell support of one axis of a rectangle."""
    lo, hi = interval.support
    step = quadrature.step_for(
        interval.min_radius,
        nodes_per_radius,
        max_frequency=math.pi * (n_max + 0.5) / interval.length,
    )
    return quadrature.nodes(lo, hi, step)


def _basis_matrix(interval: CutoffInterval, n_max: int, grid: np.ndarray) -> np.ndarray:
    return np.stack([brushlet_hat_1d(n, interval, grid) for n in range(n_max)])


def _contract(tensor: np.ndarray, matrices: Sequence[np.ndarray]) -> np.ndarray:
    """Contracts axis i of tensor with the second axis of matrices[i]."""
    for axis, matrix in enumerate(matrices):
        tensor = np.moveaxis(np.tensordot(tensor, matrix, axes=([axis], [1])), -1, axis)
    return tensor


def analyze(
    spectrum_provider: SpectrumProvider,
    truncation: Truncation,
    aniso: Anisotropy,
    nodes_per_radius: int = quadrature.NODES_PER_RADIUS,
    tolerance: float = 1e-8,
) -> CoefficientSet:
    """Coefficients <f, w_{n,R}> = int f^ w^_{n,R} for every index of the
    truncation.

    f^ is evaluated once per rectangle on the tensor grid of its bell
    support; the coefficients of all n are then separable contractions.

    Raises:
        AccuracyError: If halving the step changes a coefficient by more than
            tolerance.
    """
    coefficients: Dict[BrushletIndex, complex] = {}
    n_max = truncation.n_max
    for rect in truncation.rects(aniso):
        grids = [rect_grid(i, n_max, nodes_per_radius) for i in rect.intervals]
        samples = np.asarray(spectrum_provider(mesh(grids)), dtype=complex)
        fine_matrices = []
        coarse_matrices = []
        for interval, grid in zip(rect.intervals, grids):
            basis = _basis_matrix(interval, n_max, grid)
            fine_w, coarse_w = quadrature.paired_weights(grid)
            fine_matrices.append(basis * fine_w)
            coarse_matrices.append(basis * coarse_w)
        fine = _contract(samples, fine_matrices)
        coarse = _contract(samples, coarse_matrices)
        quadrature.verify(fine, coarse, tolerance, f"analysis of R({rect.j}, {rect.k})")
        for n in np.ndindex(*fine.shape):
            coefficients[BrushletIndex(rect.j, rect.k, n)] = complex(fine[n])
        logger.debug(
            "analyzed R(%d, %s) on %d nodes", rect.j, rect.k, samples.size
        )
    return CoefficientSet(coefficients, truncation)


def _rect_tensors(
    coeffs: CoefficientSet,
) -> Dict[Tuple[int, Tuple[int, ...]], Tuple[np.ndarray, int]]:
    tensors = {}
    for key, indices in coeffs.by_rect().items():
        size = max(max(idx.n) for idx in indices) + 1
        tensor = np.zeros((size,) * len(key[1]), dtype=complex)
        for idx in indices:
            tensor[idx.n] = coeffs[idx]
        tensors[key] = (tensor, size)
    return tensors


def synthesis_provider(coeffs: CoefficientSet, aniso: Anisotropy) -> SpectrumProvider:
    """Returns xi -> sum c_{n,R} w^_{n,R}(xi) for points stacked along the
    last axis."""
    tensors = _rect_tensors(coeffs)
    letters = string.ascii_lowercase

    def provider(xi: np.ndarray) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        flat = xi.reshape(-1, aniso.d)
        total = np.zeros(len(flat), dtype=complex)
        for (j, k), (tensor, size) in tensors.items():
            rect = lizorkin_rect(j, k, aniso)
            inside = np.ones(len(flat), dtype=bool)
            for axis, interval in enumerate(rect.intervals):
                lo, hi = interval.support
                inside &= (flat[:, axis] > lo) & (flat[:, axis] < hi)
            if not np.any(inside):
                continue
            points = flat[inside]
            factors = [
                _basis_matrix(interval, size, points[:, axis])
                for axis, interval in enumerate(rect.intervals)
            ]
            d = len(k)
            subscripts = (
                letters[:d]
                + ","
                + ",".join(f"{letters[axis]}z" for axis in range(d))
                + "->z"
            )
            total[inside] += np.einsum(subscripts, tensor, *factors)
        return total.reshape(xi.shape[:-1])

    return provider


def synthesize(
    coeffs: CoefficientSet, aniso: Anisotropy, grids: Sequence[np.ndarray]
) -> SampledSpectrum:
    """Evaluates sum c_{n,R} w^_{n,R} on a tensor grid."""
    return SampledSpectrum.sample(grids, synthesis_provider(coeffs, aniso))


def _univariate_product(
    first: Tuple[CutoffInterval, int],
    second: Tuple[CutoffInterval, int],
    nodes_per_radius: int,
    tolerance: float,
) -> float:
    (i1, n1), (i2, n2) = first, second
    lo = max(i1.support[0], i2.support[0])
    hi = min(i1.support[1], i2.support[1])
    if lo >= hi:
        return 0.0
    frequency = math.pi * max((n1 + 0.5) / i1.length, (n2 + 0.5) / i2.length)
    step = quadrature.step_for(
        min(i1.min_radius, i2.min_radius), nodes_per_radius, 2 * frequency
    )
    grid = quadrature.nodes(lo, hi, step)
    values = brushlet_hat_1d(n1, i1, grid) * brushlet_hat_1d(n2, i2, grid)
    return float(
        quadrature.trapezoid(values, grid, tolerance=tolerance, what="gram entry")
    )


def gram_matrix(
    indices: Sequence[BrushletIndex],
    aniso: Anisotropy,
    nodes_per_radius: int = quadrature.NODES_PER_RADIUS,
    tolerance: float = quadrature.DEFAULT_TOLERANCE,
) -> np.ndarray:
    """Matrix of inner products <w_a, w_b>.

    The inner product of two tensor brushlets is the product of univariate
    inner products; each distinct univariate pair is integrated once over
    the intersection of the bell supports, and pairs with disjoint supports
    are exact zeros.

    Raises:
        AccuracyError: If a univariate quadrature fails its verification.
    """
    if not indices:
        return np.zeros((0, 0))
    d = aniso.d
    gram = np.ones((len(indices), len(indices)))
    for axis in range(d):
        factors: List[Tuple[CutoffInterval, int]] = []
        position: Dict[Tuple[CutoffInterval, int], int] = {}
        rows = np.empty(len(indices), dtype=int)
        for row, idx in enumerate(indices):
            key = (idx.rect(aniso).intervals[axis], idx.n[axis])
            if key not in position:
                position[key] = len(factors)
                factors.append(key)
            rows[row] = position[key]
        table = np.zeros((len(factors), len(factors)))
        for a in range(len(factors)):
            for b in range(a, len(factors)):
                value = _univariate_product(
                    factors[a], factors[b], nodes_per_radius, tolerance
                )
                table[a, b] = table[b, a] = value
        logger.debug("gram axis %d: %d univariate factors", axis, len(factors))
        gram *= table[rows[:, None], rows[None, :]]
    return gram


def box_projection(spectrum: SampledSpectrum, j: int, aniso: Anisotropy) -> SampledSpectrum:
    """Tensor product of P on [-2^{ja_i}, 2^{ja_i}) with cutoff radius
    2^{(j-2)a_i}."""
    values = spectrum.values
    for axis, a_i in enumerate(aniso.a):
        projection = IntervalProjection.on_grid(spectrum.grids[axis], box_interval(j, a_i))
        values = projection.apply(values, axis)
    return spectrum.with_values(values)


def telescoping_check(
    j0: int, N: int, spectrum: SampledSpectrum, aniso: Anisotropy
) -> float:
    """Sup-norm residual of

        sum_{j=j0-N}^{j0+N} sum_k P_{R_{j,k}} f^ - (P_box(j0+N) - P_box(j0-N-1)) f^

    on the grid of the spectrum.

    Raises:
        DomainError: If f^ does not vanish outside the support of the top box
            projection, or the grid lacks reflected nodes.
    """
    from brushlab.brushlet import project_rect

    if N < 0:
        raise DomainError(f"N must be nonnegative, got {N}")
    top = j0 + N
    outside = np.zeros(spectrum.values.shape, dtype=bool)
    for axis, a_i in enumerate(aniso.a):
        lo, hi = box_interval(top, a_i).support
        shape = [1] * spectrum.d
        shape[axis] = -1
        grid = spectrum.grids[axis].reshape(shape)
        outside = outside | (grid <= lo) | (grid >= hi)
    if np.any(np.abs(spectrum.values[outside]) > 0):
        raise DomainError(
            f"spectrum is not band-limited to the box of level {top}"
        )
    total = np.zeros_like(spectrum.values)
    for j in range(j0 - N, top + 1):
        for rect in lizorkin_level(j, aniso):
            total += project_rect(spectrum, rect).values
    expected = (
        box_projection(spectrum, top, aniso).values
        - box_projection(spectrum, j0 - N - 1, aniso).values
    )
    residual = float(np.max(np.abs(total - expected), initial=0.0))
    logger.debug("telescoping j0=%d N=%d residual %.3e", j0, N, residual)
    return residual


# The profile theta is the bell of [-1/2, 1/2) with cutoffs 1/2 read on
# log2 t: its integer translates are adjacent compatible bells, whose squares
# sum to one.
_PROFILE = BellFunction(CutoffInterval(-0.5, 0.5, 0.5, 0.5))


@dataclass(frozen=True)
class AdmissiblePair:
    """Self-dual admissible pair phi = psi with phi^(xi) = theta(|xi|_a).

    Support and core are ranges of the quasi-norm |xi|_a, not of the
    Euclidean norm; the two agree only for a = (1, ..., 1).

    Attributes:
        aniso: Anisotropy of the dilations 2^{ja}.
        support: Range [1/2, 2] of |xi|_a outside which phi^ vanishes.
        core: Range [2^{-3/4}, 2^{3/4}] of |xi|_a on which |phi^| >= lower_bound.
        lower_bound: The constant c of that lower bound.
    """

    aniso: Anisotropy
    support: Tuple[float, float] = (0.5, 2.0)
    core: Tuple[float, float] = (2.0**-0.75, 2.0**0.75)
    lower_bound: float = field(default_factory=lambda: float(_PROFILE(0.75)))

    @staticmethod
    def theta(t: ArrayLike) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        positive = t > 0
        s = np.log2(np.where(positive, t, 1.0))
        return np.where(positive, _PROFILE(s), 0.0)

    def phi_hat(self, xi: ArrayLike) -> np.ndarray:
        return self.theta(quasi_norms(xi, self.aniso))

    def phi_hat_level(self, j: int, xi: ArrayLike) -> np.ndarray:
        """phi^_j(xi) = phi^(2^{-ja} xi)."""
        return self.phi_hat(self.aniso.dilate(2.0**-j, xi))

    def levels_at(self, xi: ArrayLike) -> range:
        """Levels j whose support T_j may contain xi."""
        t = float(quasi_norms(np.asarray(xi, dtype=float), self.aniso))
        if t == 0:
            raise DomainError("phi4 is undefined at xi = 0")
        center = math.log2(t)
        return range(math.floor(center) - 1, math.ceil(center) + 2)


def build_admissible(aniso: Anisotropy) -> AdmissiblePair:
    return AdmissiblePair(aniso)


def phi4_residual(pair: AdmissiblePair, xi: ArrayLike) -> float:
    """|sum_j |phi^(2^{-ja} xi)|^2 - 1| over the levels whose support
    contains xi.

    Raises:
        DomainError: If xi = 0.
    """
    xi = np.asarray(xi, dtype=float)
    t = float(quasi_norms(xi, pair.aniso))
    if t == 0:
        raise DomainError("phi4 is undefined at xi = 0")
    levels = pair.levels_at(xi)
    total = math.fsum(float(pair.theta(2.0**-j * t)) ** 2 for j in levels)
    return abs(total - 1.0)


def t_overlap(pair: AdmissiblePair, samples: ArrayLike) -> int:
    """Largest spread |i - j| of levels whose closed support
    T_j = {2^{j-1} <= |xi|_a <= 2^{j+1}} contains a common sample."""
    t = quasi_norms(samples, pair.aniso).reshape(-1)
    t = t[t > 0]
    spread = 0
    for value in t:
        center = math.log2(value)
        members = [
            j
            for j in range(math.floor(center) - 2, math.ceil(center) + 3)
            if 2.0 ** (j - 1) <= value <= 2.0 ** (j + 1)
        ]
        spread = max(spread, max(members) - min(members))
    return spread


def random_band_limited(
    half_widths: Sequence[float], rng: np.random.Generator, terms: int = 4
) -> SpectrumProvider:
    """Random smooth spectrum vanishing outside the box prod [-h_i, h_i].

    A random trigonometric polynomial times a tensor product of bells
    supported in [-0.9 h_i, 0.9 h_i].
    """
    scales = np.asarray([float(h) for h in half_widths])
    if np.any(scales <= 0):
        raise DomainError("half widths must be positive")
    window = BellFunction(CutoffInterval(-0.6, 0.6, 0.3, 0.3))
    amplitudes = rng.standard_normal(terms) + 1j * rng.standard_normal(terms)
    frequencies = rng.uniform(-2.0, 2.0, size=(terms, len(scales)))

    def provider(xi: np.ndarray) -> np.ndarray:
        u = np.asarray(xi, dtype=float) / scales
        envelope = np.prod(window(u), axis=-1)
        phases = np.exp(1j * (u @ frequencies.T))
        return envelope * (phases @ amplitudes)

    return provider


def telescoping_grids(
    j0: int, N: int, aniso: Anisotropy, refinement: int = 4
) -> List[np.ndarray]:
    """Per-axis grids on which the telescoping identity can be checked.

    Each grid is a lattice whose step divides every interval endpoint of
    the levels j0-N-1..j0+N, so it contains all reflected nodes, and it
    covers the bell support of the top box.

    Raises:
        DomainError: If an endpoint is not a multiple of the step, which
            happens for non-integer exponents.
    """
    if N < 0:
        raise DomainError(f"N must be nonnegative, got {N}")
    grids = []
    for a_i in aniso.a:
        step = dyadic_step(2.0 ** ((j0 - N - 1) * a_i) / refinement)
        endpoints = [0.0]
        for j in range(j0 - N - 1, j0 + N + 1):
            endpoints += [2.0 ** (j * a_i), -(2.0 ** (j * a_i))]
        lo, hi = box_interval(j0 + N, a_i).support
        grids.append(symmetric_grid(lo - step, hi + step, step, endpoints))
    return grids
