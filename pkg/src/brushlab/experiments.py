"""The experiments behind the brushlab subcommands.

Each experiment reads its settings from an
:class:`~brushlab.config.ExperimentConfig` and returns an
:class:`~brushlab.registry.ExperimentOutput`: the rows of its CSV table and
the values of its JSON summary.
"""

import logging
from typing import Optional, Tuple

import numpy as np

from brushlab import codec
from brushlab.anisotropy import Anisotropy
from brushlab.approx import (
    approx_decay,
    bernstein_experiment,
    democracy_experiment,
    embedding_check,
    embedding_relation,
    jackson_experiment,
    lacunary_family,
    random_coefficients,
    single_term_ratio,
    unmixed_smoothness,
)
from brushlab.brushlet import BrushletIndex, indices_in
from brushlab.config import ExperimentConfig
from brushlab.error import ConfigError
from brushlab.mixed_norms import MixedNormParams, b_norm, f_norm, single_term_norm
from brushlab.registry import ExperimentOutput, TaskPool, default_registry
from brushlab.spectrum import SampledSpectrum
from brushlab.transform import (
    CoefficientSet,
    Truncation,
    build_admissible,
    gram_matrix,
    phi4_residual,
    random_band_limited,
    t_overlap,
    telescoping_check,
    telescoping_grids,
)

logger = logging.getLogger(__name__)

# Random frequencies of the admissible pair check.
_PHI4_SAMPLES = 1000


def anisotropy_of(config: ExperimentConfig) -> Anisotropy:
    return Anisotropy(config.anisotropy)


def truncation_of(config: ExperimentConfig) -> Truncation:
    return Truncation(config.j_min, config.j_max, config.n_max)


def params_of(config: ExperimentConfig, s: Optional[float] = None) -> MixedNormParams:
    config.require("p")
    assert config.p is not None
    return MixedNormParams(
        config.p, config.q, config.s if s is None else s, anisotropy_of(config)
    )


def coefficients_of(config: ExperimentConfig, rng: np.random.Generator) -> CoefficientSet:
    """The serialized coefficient set named by the configuration, or a random
    one of config.size terms."""
    if config.coefficients is not None:
        coeffs = codec.load(config.coefficients)
        if coeffs.indices() and coeffs.indices()[0].d != len(config.anisotropy):
            raise ConfigError("coefficient set and anisotropy differ in dimension")
        return coeffs
    return random_coefficients(
        truncation_of(config), len(config.anisotropy), config.size, rng
    )


def _index_columns(idx: BrushletIndex) -> Tuple[int, str, str]:
    return (
        idx.j,
        " ".join(str(v) for v in idx.k),
        " ".join(str(v) for v in idx.n),
    )


@default_registry.experiment("basis-check")
def basis_check(config: ExperimentConfig, pool: TaskPool) -> ExperimentOutput:
    """Deviation of the Gram matrix of the truncated system from the
    identity."""
    aniso = anisotropy_of(config)
    truncation = truncation_of(config)
    indices = indices_in(truncation.rects(aniso), truncation.n_max)
    gram = gram_matrix(indices, aniso, config.grid_resolution, config.tolerance)
    deviation = np.abs(gram - np.eye(len(indices)))
    output = ExperimentOutput(("j", "k", "n", "diagonal", "off_diagonal_max"))
    for row, idx in enumerate(indices):
        off = np.delete(deviation[row], row)
        output.rows.append(
            _index_columns(idx)
            + (float(gram[row, row]), float(np.max(off, initial=0.0)))
        )
    output.results = {
        "size": len(indices),
        "gram_residual": float(np.max(deviation, initial=0.0)),
        "symmetry_residual": float(np.max(np.abs(gram - gram.T), initial=0.0)),
    }
    return output


@default_registry.experiment("complete-check")
async def complete_check(config: ExperimentConfig, pool: TaskPool) -> ExperimentOutput:
    """Telescoping residuals on random band-limited spectra and the checks
    of the admissible pair."""
    aniso = anisotropy_of(config)
    j0, N = config.j0, config.levels
    grids = telescoping_grids(j0, N, aniso)
    half_widths = [2.0 ** ((j0 + N) * a) for a in aniso.a]

    def trial(t: int) -> float:
        rng = np.random.default_rng([config.seed, t])
        spectrum = SampledSpectrum.sample(grids, random_band_limited(half_widths, rng))
        return telescoping_check(j0, N, spectrum, aniso)

    residuals = await pool.map(trial, range(config.trials))

    pair = build_admissible(aniso)
    rng = np.random.default_rng(config.seed)
    directions = rng.standard_normal((_PHI4_SAMPLES, aniso.d))
    scales = 2.0 ** rng.uniform(-4, 4, _PHI4_SAMPLES)
    samples = directions * np.power(scales[:, None], aniso.as_array())
    phi4 = max(phi4_residual(pair, xi) for xi in samples)

    output = ExperimentOutput(("trial", "telescoping_residual"))
    output.rows = [(t, r) for t, r in enumerate(residuals)]
    output.results = {
        "telescoping_residual": max(residuals, default=0.0),
        "phi4_residual": phi4,
        "support_overlap": t_overlap(pair, samples),
        "lower_bound": pair.lower_bound,
        "grid_nodes": [len(g) for g in grids],
    }
    return output


@default_registry.experiment("norm")
def norm(config: ExperimentConfig, pool: TaskPool) -> ExperimentOutput:
    """f and b norms of a coefficient set."""
    params = params_of(config)
    coeffs = coefficients_of(config, np.random.default_rng(config.seed))
    output = ExperimentOutput(("j", "k", "n", "re", "im", "single_term_norm"))
    for idx, value in coeffs.items():
        output.rows.append(
            _index_columns(idx)
            + (value.real, value.imag, single_term_norm(idx, value, params))
        )
    output.results = {
        "count": len(coeffs),
        "f_norm": f_norm(coeffs, params),
        "b_norm": b_norm(coeffs, params),
    }
    return output


@default_registry.experiment("approx-decay")
async def approx_decay_curve(config: ExperimentConfig, pool: TaskPool) -> ExperimentOutput:
    """Greedy error curve of a coefficient set, with the oracle alongside
    when config.oracle is set."""
    params = params_of(config)
    coeffs = coefficients_of(config, np.random.default_rng(config.seed))
    kind = config.norm_kind
    rows = await pool.map(
        lambda m: approx_decay(coeffs, params, [m], kind, config.oracle)[0],
        config.m_list,
    )
    output = ExperimentOutput(("m", "greedy_error", "oracle_error"))
    output.rows = [(r.m, r.greedy, "" if r.oracle is None else r.oracle) for r in rows]
    ordered = sorted(rows, key=lambda r: r.m)
    output.results = {
        "count": len(coeffs),
        "norm_kind": kind,
        "monotone": all(
            b.greedy <= a.greedy for a, b in zip(ordered, ordered[1:])
        ),
        "oracle_below_greedy": all(
            r.oracle <= r.greedy * (1 + 1e-12) for r in rows if r.oracle is not None
        ),
    }
    return output


@default_registry.experiment("democracy")
def democracy(config: ExperimentConfig, pool: TaskPool) -> ExperimentOutput:
    """Growth rates of the extremal sums along two axes."""
    config.require("p")
    assert config.p is not None
    axis_n = config.axis_index(config.axis_n or 1)
    axis_m = config.axis_index(config.axis_m or 2)
    result = democracy_experiment(
        config.p,
        config.q,
        config.beta,
        axis_n,
        axis_m,
        config.N_list,
        anisotropy_of(config),
    )
    output = ExperimentOutput(("N", "norm_axis_n", "norm_axis_m"))
    output.rows = list(zip(result.N, *result.norms))
    output.results = {
        "slope_n": result.slopes[0],
        "slope_m": result.slopes[1],
        "predicted_n": result.predicted[0],
        "predicted_m": result.predicted[1],
    }
    return output


@default_registry.experiment("bernstein")
def bernstein(config: ExperimentConfig, pool: TaskPool) -> ExperimentOutput:
    """Growth exponent of the b to f norm ratio on an extremal family."""
    config.require("p", "tau")
    assert config.p is not None and config.tau is not None
    axis = None if config.axis is None else config.axis_index(config.axis)
    result = bernstein_experiment(
        config.p,
        config.tau,
        config.q,
        config.r,
        config.N_list,
        anisotropy_of(config),
        config.beta,
        axis,
    )
    output = ExperimentOutput(("N", "ratio"))
    output.rows = list(zip(result.N, result.ratios))
    output.results = {
        "axis": result.axis + 1,
        "exponent": result.exponent,
        "predicted": result.predicted,
        "bound": result.bound,
    }
    return output


@default_registry.experiment("jackson")
def jackson(config: ExperimentConfig, pool: TaskPool) -> ExperimentOutput:
    """Greedy errors against the Jackson bound, and the saturation witness."""
    config.require("p", "tau")
    assert config.p is not None and config.tau is not None
    aniso = anisotropy_of(config)
    f_params = MixedNormParams(config.p, config.r, config.beta, aniso)
    rng = np.random.default_rng(config.seed)
    families = [lacunary_family(f_params, list(truncation_of(config).levels))]
    for _ in range(config.trials):
        families.append(
            random_coefficients(truncation_of(config), aniso.d, config.size, rng)
        )
    result = jackson_experiment(
        config.p,
        config.tau,
        config.r,
        families,
        config.m_list,
        aniso,
        config.beta,
        config.N_list,
        config.axis_index(config.axis or 1),
        config.epsilon,
    )
    output = ExperimentOutput(("family", "m", "greedy_error", "bound", "constant"))
    for number, curve in enumerate(result.curves):
        for m, error, bound in zip(curve.m, curve.errors, curve.bounds):
            output.rows.append((number, m, error, bound, error / bound if bound else ""))
    witness = result.witness
    assert witness is not None
    output.results = {
        "rate": result.rate,
        "constant": result.constant,
        "witness_axis": witness.axis + 1,
        "residual_slope": witness.residual_slope,
        "smoothness_slope": witness.smoothness_slope,
        "predicted_residual_slope": 1.0 / config.p[witness.axis],
        "predicted_smoothness_slope": 1.0 / config.tau[witness.axis],
    }
    return output


def embedding_pair(config: ExperimentConfig) -> Tuple[MixedNormParams, MixedNormParams]:
    """Source and target of the embedding named by config.relation."""
    params = params_of(config)
    d = params.aniso.d
    if config.relation == "identity":
        return params, params
    if config.relation == "lower":
        source = MixedNormParams(
            (params.p_min,) * d, params.q, unmixed_smoothness(params, params.p_min), params.aniso
        )
        return source, params
    target = MixedNormParams(
        (params.p_max,) * d, params.q, unmixed_smoothness(params, params.p_max), params.aniso
    )
    return params, target


@default_registry.experiment("embed")
async def embed(config: ExperimentConfig, pool: TaskPool) -> ExperimentOutput:
    """Embedding ratios over a corpus of random coefficient sets, plus the
    closed form on single coefficients."""
    source, target = embedding_pair(config)
    relation = embedding_relation(source, target)
    kind = config.norm_kind
    truncation = truncation_of(config)
    d = source.aniso.d

    def trial(t: int) -> Tuple[float, float]:
        rng = np.random.default_rng([config.seed, t])
        coeffs = random_coefficients(truncation, d, config.size, rng)
        single = random_coefficients(truncation, d, 1, rng)
        idx = single.indices()[0]
        closed = single_term_ratio(idx, source, target)
        engine = embedding_check(source, target, single, kind)
        return embedding_check(source, target, coeffs, kind), abs(engine - closed) / closed

    results = await pool.map(trial, range(config.trials))
    ratios = [r for r, _ in results]
    output = ExperimentOutput(("trial", "ratio", "single_term_error"))
    output.rows = [(t, r, e) for t, (r, e) in enumerate(results)]
    output.results = {
        "relation": relation,
        "max_ratio": max(ratios),
        "min_ratio": min(ratios),
        "single_term_error": max(e for _, e in results),
    }
    return output
