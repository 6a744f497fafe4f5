"""Nonlinear m-term approximation with brushlets.

Coefficient sets are approximated by keeping m of their terms. The greedy
rule keeps the terms of largest single-term norm; the oracle searches every
m-subset. The experiments measure how norms of the extremal sums

    F_N = sum_{l=1}^{N} c w_{l e_axis, R_{j,k}}

grow with N, which is what separates the mixed and unmixed cases.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from brushlab.anisotropy import Anisotropy
from brushlab.brushlet import BrushletIndex
from brushlab.covering import sign_magnitude_vectors, validate_k
from brushlab.error import DomainError, SizeLimitError
from brushlab.mixed_norms import (
    MixedNormParams,
    sequence_norm,
    single_term_norm,
)
from brushlab.transform import CoefficientSet, Truncation

logger = logging.getLogger(__name__)

ORACLE_SIZE_CAP = 14
"""Largest coefficient set the exhaustive oracle accepts."""

DEFAULT_EPSILON = 0.1


def normalization_weight(j: int, params: MixedNormParams) -> float:
    """c_j = 2^{j(sum_i a_i/p_i - s - nu/2)}, with s playing the role of the
    smoothness beta of the target space."""
    aniso = params.aniso
    exponent = (
        math.fsum(a / p for a, p in zip(aniso.a, params.p) if p != math.inf)
        - params.s
        - aniso.nu / 2
    )
    return 2.0 ** (j * exponent)


@dataclass(frozen=True)
class NormalizedSystem:
    """Brushlets rescaled so that each has single-term norm close to one in
    the space described by params."""

    params: MixedNormParams
    truncation: Truncation

    def weight(self, idx: BrushletIndex) -> float:
        return normalization_weight(idx.j, self.params)

    def element(self, idx: BrushletIndex, scale: complex = 1.0) -> CoefficientSet:
        return CoefficientSet({idx: scale * self.weight(idx)}, self.truncation)

    def norms(self) -> Dict[Tuple[int, Tuple[int, ...]], float]:
        """Single-term norm of the normalized elements of every rectangle of
        the truncation. The norm does not depend on n."""
        zero = (0,) * self.params.aniso.d
        norms = {}
        for j in self.truncation.levels:
            for k in sign_magnitude_vectors(self.params.aniso.d):
                idx = BrushletIndex(j, k, zero)
                norms[(j, k)] = single_term_norm(idx, self.weight(idx), self.params)
        return norms

    def spread(self) -> float:
        """Smallest C with every normalized single-term norm in [1/C, C]."""
        values = list(self.norms().values())
        return max(max(values), 1.0 / min(values))


def normalized_system(params: MixedNormParams, truncation: Truncation) -> NormalizedSystem:
    return NormalizedSystem(params, truncation)


@dataclass(frozen=True)
class ApproxResult:
    """Outcome of one m-term approximation.

    Attributes:
        m: Number of kept terms.
        selected: Kept indices, in the order they were chosen.
        error: Norm of the residual coefficients.
        method: "greedy" or "oracle".
    """

    m: int
    selected: Tuple[BrushletIndex, ...]
    error: float
    method: str


def _check_m(m: int) -> None:
    if m < 0:
        raise DomainError(f"m must be nonnegative, got {m}")


def greedy_order(coeffs: CoefficientSet, params: MixedNormParams) -> List[BrushletIndex]:
    """Indices by decreasing single-term norm, ties broken by (j, k, n)."""
    return sorted(
        coeffs.indices(),
        key=lambda idx: (-single_term_norm(idx, coeffs[idx], params), idx),
    )


def greedy_select(
    coeffs: CoefficientSet, params: MixedNormParams, m: int, kind: str = "f"
) -> ApproxResult:
    """Keeps the m terms of largest single-term norm.

    Raises:
        DomainError: If m < 0.
    """
    _check_m(m)
    selected = tuple(greedy_order(coeffs, params)[:m])
    error = sequence_norm(coeffs.without(selected), params, kind)
    return ApproxResult(m, selected, error, "greedy")


def greedy_curve(
    coeffs: CoefficientSet, params: MixedNormParams, m_list: Sequence[int], kind: str = "f"
) -> List[ApproxResult]:
    order = greedy_order(coeffs, params)
    results = []
    for m in m_list:
        _check_m(m)
        selected = tuple(order[:m])
        results.append(
            ApproxResult(
                m, selected, sequence_norm(coeffs.without(selected), params, kind), "greedy"
            )
        )
    return results


def sigma_m_oracle(
    coeffs: CoefficientSet,
    params: MixedNormParams,
    m: int,
    kind: str = "f",
    cap: int = ORACLE_SIZE_CAP,
) -> ApproxResult:
    """Smallest residual norm over all m-subsets of the terms.

    Raises:
        DomainError: If m < 0.
        SizeLimitError: If the set has more than cap terms.
    """
    _check_m(m)
    size = len(coeffs)
    if size > cap:
        raise SizeLimitError(f"oracle refuses {size} coefficients, the cap is {cap}")
    if size >= cap - 2:
        logger.warning("oracle on %d coefficients is close to its cap %d", size, cap)
    indices = coeffs.indices()
    if m >= size:
        return ApproxResult(m, tuple(indices), 0.0, "oracle")
    best: Optional[Tuple[float, Tuple[BrushletIndex, ...]]] = None
    for subset in itertools.combinations(indices, m):
        error = sequence_norm(coeffs.without(subset), params, kind)
        if best is None or error < best[0]:
            best = (error, subset)
    assert best is not None
    return ApproxResult(m, best[1], best[0], "oracle")


def fit_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log y against log x.

    Raises:
        DomainError: With fewer than 3 points or nonpositive values.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if len(x) != len(y):
        raise DomainError("slope fit needs as many x as y values")
    if len(x) < 3:
        raise DomainError(f"slope fit needs at least 3 points, got {len(x)}")
    if np.any(x <= 0) or np.any(y <= 0):
        raise DomainError("slope fit needs positive values")
    slope, _ = np.polyfit(np.log(x), np.log(y), 1)
    return float(slope)


def default_k(d: int) -> Tuple[int, ...]:
    return (2,) * d


def extremal_family(
    params: MixedNormParams,
    N: int,
    axis: int,
    j: int = 0,
    k: Optional[Sequence[int]] = None,
    scale: float = 1.0,
) -> CoefficientSet:
    """F_N: the N normalized brushlets w_{l e_axis, R_{j,k}}, l = 1..N.

    Raises:
        DomainError: If N < 1 or the axis is out of range.
    """
    d = params.aniso.d
    if N < 1:
        raise DomainError(f"N must be positive, got {N}")
    if not 0 <= axis < d:
        raise DomainError(f"axis {axis} out of range for dimension {d}")
    k = validate_k(default_k(d) if k is None else k, d)
    weight = scale * normalization_weight(j, params)
    coefficients = {}
    for ell in range(1, N + 1):
        n = [0] * d
        n[axis] = ell
        coefficients[BrushletIndex(j, k, tuple(n))] = weight
    return CoefficientSet(coefficients, Truncation(j, j, N + 1))


def _check_geometric(N_list: Sequence[int]) -> List[int]:
    values = [int(v) for v in N_list]
    if len(values) < 3:
        raise DomainError(f"need at least 3 values of N, got {len(values)}")
    if any(v < 1 for v in values):
        raise DomainError("N values must be positive")
    return values


@dataclass(frozen=True)
class SlopeResult:
    """Norms of one or two extremal families and their fitted growth rates."""

    N: Tuple[int, ...]
    norms: Tuple[Tuple[float, ...], ...]
    slopes: Tuple[float, ...]
    predicted: Tuple[float, ...]


def democracy_experiment(
    p: Sequence[float],
    q: float,
    beta: float,
    axis_n: int,
    axis_m: int,
    N_list: Sequence[int],
    aniso: Optional[Anisotropy] = None,
) -> SlopeResult:
    """Growth of ||F_N|| and ||G_N|| in f^beta_{p,q}, the families lying
    along axis_n and axis_m.

    Raises:
        DomainError: If the axes coincide or fewer than 3 N are given.
    """
    aniso = aniso or Anisotropy.isotropic(len(p))
    params = MixedNormParams(tuple(p), q, beta, aniso)
    if axis_n == axis_m:
        raise DomainError("democracy experiment needs two distinct axes")
    N_values = _check_geometric(N_list)
    norms = []
    for axis in (axis_n, axis_m):
        norms.append(
            tuple(
                sequence_norm(extremal_family(params, N, axis), params, "f")
                for N in N_values
            )
        )
    slopes = tuple(fit_slope(N_values, row) for row in norms)
    logger.info("democracy slopes %s for p=%s", slopes, params.p)
    return SlopeResult(
        tuple(N_values),
        tuple(norms),
        slopes,
        (1.0 / params.p[axis_n], 1.0 / params.p[axis_m]),
    )


def _smoothness_shift(aniso: Anisotropy, tau: Sequence[float], p: Sequence[float]) -> float:
    """sum_i a_i/tau_i - sum_i a_i/p_i."""
    return math.fsum(a / t for a, t in zip(aniso.a, tau)) - math.fsum(
        a / v for a, v in zip(aniso.a, p)
    )


def _check_strict(tau: Sequence[float], p: Sequence[float]) -> None:
    if len(tau) != len(p):
        raise DomainError("tau and p must have the same dimension")
    if not all(t < v for t, v in zip(tau, p)):
        raise DomainError(f"need tau_i < p_i on every axis, got tau={tau}, p={p}")


@dataclass(frozen=True)
class BernsteinResult:
    """Measured growth of ||F_N||_b / ||F_N||_f.

    Attributes:
        axis: Axis of the extremal family.
        exponent: Fitted growth exponent.
        predicted: 1/tau_axis - 1/p_axis, the exponent of that family.
        bound: 1/tau_min - 1/p_max, the general upper exponent.
    """

    axis: int
    N: Tuple[int, ...]
    ratios: Tuple[float, ...]
    exponent: float
    predicted: float
    bound: float


def bernstein_experiment(
    p: Sequence[float],
    tau: Sequence[float],
    q: float,
    r: float,
    N_list: Sequence[int],
    aniso: Optional[Anisotropy] = None,
    beta: float = 0.0,
    axis: Optional[int] = None,
    scale: float = 1.0,
) -> BernsteinResult:
    """Fits the growth of ||F_N||_{b^alpha_{tau,q}} / ||F_N||_{f^beta_{p,r}}
    with alpha - beta = sum a_i/tau_i - sum a_i/p_i.

    Without an explicit axis the family lies along an axis realizing both
    tau_min and p_max.

    Raises:
        DomainError: If tau_i >= p_i on some axis, tau_min >= p_max, or no
            axis realizes tau_min and p_max.
    """
    p = tuple(float(v) for v in p)
    tau = tuple(float(v) for v in tau)
    _check_strict(tau, p)
    if not min(tau) < max(p):
        raise DomainError("need tau_min < p_max")
    aniso = aniso or Anisotropy.isotropic(len(p))
    if axis is None:
        candidates = [
            i for i in range(len(p)) if tau[i] == min(tau) and p[i] == max(p)
        ]
        if not candidates:
            raise DomainError(
                f"no axis realizes both tau_min and p_max for tau={tau}, p={p}"
            )
        axis = candidates[0]
    f_params = MixedNormParams(p, r, beta, aniso)
    b_params = MixedNormParams(tau, q, beta + _smoothness_shift(aniso, tau, p), aniso)
    N_values = _check_geometric(N_list)
    ratios = []
    for N in N_values:
        family = extremal_family(f_params, N, axis, scale=scale)
        ratios.append(
            sequence_norm(family, b_params, "b") / sequence_norm(family, f_params, "f")
        )
    exponent = fit_slope(N_values, ratios)
    return BernsteinResult(
        axis,
        tuple(N_values),
        tuple(ratios),
        exponent,
        1.0 / tau[axis] - 1.0 / p[axis],
        1.0 / min(tau) - 1.0 / max(p),
    )


def jackson_rate(tau: Sequence[float], p: Sequence[float]) -> float:
    """1/tau_max - 1/p_min."""
    return 1.0 / max(tau) - 1.0 / min(p)


def _check_jackson(tau: Sequence[float], p: Sequence[float]) -> None:
    _check_strict(tau, p)
    if not max(tau) < min(p):
        raise DomainError(f"need tau_max < p_min, got tau={tau}, p={p}")


@dataclass(frozen=True)
class JacksonCurve:
    """Greedy errors of one coefficient set against the Jackson bound
    m^{-rate} ||coeffs||_b.

    Attributes:
        constants: error / bound for every m with a nonzero bound.
    """

    m: Tuple[int, ...]
    errors: Tuple[float, ...]
    bounds: Tuple[float, ...]
    constants: Tuple[float, ...]

    @property
    def constant(self) -> float:
        return max(self.constants, default=0.0)


@dataclass(frozen=True)
class JacksonWitness:
    """Greedy saturation on F_{2N} - epsilon F_N.

    Attributes:
        residuals: f-norm of the residual after N greedy steps.
        smoothness: b-norm of F_N.
        residual_slope: Growth of the residuals, expected 1/p_axis.
        smoothness_slope: Growth of the b-norms, expected 1/tau_axis.
    """

    axis: int
    N: Tuple[int, ...]
    residuals: Tuple[float, ...]
    smoothness: Tuple[float, ...]
    residual_slope: float
    smoothness_slope: float


@dataclass(frozen=True)
class JacksonResult:
    rate: float
    curves: Tuple[JacksonCurve, ...]
    witness: Optional[JacksonWitness]

    @property
    def constant(self) -> float:
        return max((c.constant for c in self.curves), default=0.0)


def jackson_curve(
    coeffs: CoefficientSet,
    f_params: MixedNormParams,
    b_params: MixedNormParams,
    m_list: Sequence[int],
    rate: float,
) -> JacksonCurve:
    smoothness = sequence_norm(coeffs, b_params, "b")
    results = greedy_curve(coeffs, f_params, m_list, "f")
    errors = tuple(r.error for r in results)
    bounds = tuple(max(r.m, 1) ** (-rate) * smoothness for r in results)
    constants = tuple(e / b for e, b in zip(errors, bounds) if b > 0)
    return JacksonCurve(tuple(r.m for r in results), errors, bounds, constants)


def jackson_witness(
    f_params: MixedNormParams,
    b_params: MixedNormParams,
    N_list: Sequence[int],
    axis: int = 0,
    epsilon: float = DEFAULT_EPSILON,
) -> JacksonWitness:
    """After N greedy steps on F_{2N} - epsilon F_N only (1 - epsilon) F_N
    remains, whose f-norm grows like N^{1/p_axis} while ||F_N||_b grows like
    N^{1/tau_axis}."""
    if not 0 < epsilon < 1:
        raise DomainError(f"epsilon must be in (0, 1), got {epsilon}")
    N_values = _check_geometric(N_list)
    residuals = []
    smoothness = []
    for N in N_values:
        small = extremal_family(f_params, N, axis)
        large = extremal_family(f_params, 2 * N, axis)
        small = CoefficientSet(small.coefficients, large.truncation)
        mixed = large.combine(small, 1.0, -epsilon)
        residuals.append(greedy_select(mixed, f_params, N, "f").error)
        smoothness.append(sequence_norm(small, b_params, "b"))
    return JacksonWitness(
        axis,
        tuple(N_values),
        tuple(residuals),
        tuple(smoothness),
        fit_slope(N_values, residuals),
        fit_slope(N_values, smoothness),
    )


def jackson_experiment(
    p: Sequence[float],
    tau: Sequence[float],
    r: float,
    families: Sequence[CoefficientSet],
    m_list: Sequence[int],
    aniso: Optional[Anisotropy] = None,
    beta: float = 0.0,
    N_list: Optional[Sequence[int]] = None,
    axis: int = 0,
    epsilon: float = DEFAULT_EPSILON,
) -> JacksonResult:
    """Greedy errors in f^beta_{p,r} against m^{-(1/tau_max - 1/p_min)}
    ||.||_{b^alpha_{tau,tau_max}} for each family, plus the saturation
    witness when N_list is given.

    Raises:
        DomainError: If tau_i >= p_i on some axis or tau_max >= p_min.
    """
    p = tuple(float(v) for v in p)
    tau = tuple(float(v) for v in tau)
    _check_jackson(tau, p)
    aniso = aniso or Anisotropy.isotropic(len(p))
    f_params = MixedNormParams(p, r, beta, aniso)
    b_params = MixedNormParams(
        tau, max(tau), beta + _smoothness_shift(aniso, tau, p), aniso
    )
    rate = jackson_rate(tau, p)
    curves = tuple(
        jackson_curve(family, f_params, b_params, m_list, rate) for family in families
    )
    witness = (
        jackson_witness(f_params, b_params, N_list, axis, epsilon)
        if N_list is not None
        else None
    )
    result = JacksonResult(rate, curves, witness)
    logger.info("jackson rate %.4f, fitted constant %.4g", rate, result.constant)
    return result


def unmixed_smoothness(params: MixedNormParams, exponent: float) -> float:
    """s - sum_i a_i/p_i + nu/exponent, the smoothness of the unmixed space
    with the given exponent on the same differential dimension."""
    aniso = params.aniso
    return (
        params.s
        - math.fsum(a / v for a, v in zip(aniso.a, params.p))
        + aniso.nu / exponent
    )


def embedding_relation(source: MixedNormParams, target: MixedNormParams) -> str:
    """Names the embedding from source into target: "identity", "lower"
    (unmixed p_min source) or "upper" (unmixed p_max target).

    Raises:
        DomainError: If the two parameter sets are not related by one of
            these embeddings.
    """
    if source.aniso != target.aniso:
        raise DomainError("embedding needs a common anisotropy")
    if source.q != target.q:
        raise DomainError("embedding needs a common q")
    if source == target:
        return "identity"
    if source.is_unmixed and source.p[0] == target.p_min:
        if math.isclose(source.s, unmixed_smoothness(target, target.p_min), abs_tol=1e-12):
            return "lower"
    if target.is_unmixed and target.p[0] == source.p_max:
        if math.isclose(target.s, unmixed_smoothness(source, source.p_max), abs_tol=1e-12):
            return "upper"
    raise DomainError(
        f"no embedding from p={source.p}, s={source.s} into p={target.p}, s={target.s}"
    )


def embedding_check(
    source: MixedNormParams,
    target: MixedNormParams,
    coeffs: CoefficientSet,
    kind: str = "b",
) -> float:
    """||coeffs||_target / ||coeffs||_source.

    Raises:
        DomainError: If the parameters are not related by an embedding or
            the source norm vanishes.
    """
    embedding_relation(source, target)
    denominator = sequence_norm(coeffs, source, kind)
    if denominator == 0:
        raise DomainError("source norm vanishes")
    return sequence_norm(coeffs, target, kind) / denominator


def single_term_ratio(
    idx: BrushletIndex, source: MixedNormParams, target: MixedNormParams
) -> float:
    """Embedding ratio of a one-coefficient set in closed form."""
    return single_term_norm(idx, 1.0, target) / single_term_norm(idx, 1.0, source)


def random_coefficients(
    truncation: Truncation, d: int, size: int, rng: np.random.Generator
) -> CoefficientSet:
    """size distinct indices drawn uniformly from the truncation, with
    standard complex normal coefficients."""
    ks = sign_magnitude_vectors(d)
    levels = list(truncation.levels)
    total = len(levels) * len(ks) * truncation.n_max**d
    if size > total:
        raise DomainError(f"truncation holds {total} indices, asked for {size}")
    chosen: Dict[BrushletIndex, complex] = {}
    while len(chosen) < size:
        idx = BrushletIndex(
            levels[int(rng.integers(len(levels)))],
            ks[int(rng.integers(len(ks)))],
            tuple(int(v) for v in rng.integers(truncation.n_max, size=d)),
        )
        if idx not in chosen:
            chosen[idx] = complex(rng.standard_normal(), rng.standard_normal())
    return CoefficientSet(chosen, truncation)


def lacunary_family(
    params: MixedNormParams,
    levels: Sequence[int],
    k: Optional[Sequence[int]] = None,
    ratio: float = 4.0,
) -> CoefficientSet:
    """Normalized brushlets w_{0, R_{j_i,k}} with magnitudes ratio^{-i}."""
    d = params.aniso.d
    levels = [int(j) for j in levels]
    if len(set(levels)) != len(levels):
        raise DomainError("lacunary levels must be distinct")
    k = validate_k(default_k(d) if k is None else k, d)
    coefficients = {
        BrushletIndex(j, k, (0,) * d): ratio ** (-i) * normalization_weight(j, params)
        for i, j in enumerate(levels)
    }
    return CoefficientSet(coefficients, Truncation(min(levels), max(levels), 1))


@dataclass(frozen=True)
class DecayRow:
    m: int
    greedy: float
    oracle: Optional[float] = field(default=None)


def approx_decay(
    coeffs: CoefficientSet,
    params: MixedNormParams,
    m_list: Sequence[int],
    kind: str = "f",
    oracle: bool = False,
) -> List[DecayRow]:
    """Greedy error curve, with the oracle error alongside when asked."""
    rows = []
    for result in greedy_curve(coeffs, params, m_list, kind):
        best = sigma_m_oracle(coeffs, params, result.m, kind).error if oracle else None
        rows.append(DecayRow(result.m, result.error, best))
    return rows
