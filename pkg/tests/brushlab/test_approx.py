import logging
import math

import numpy as np
import pytest

from brushlab.anisotropy import Anisotropy
from brushlab.approx import (
    ORACLE_SIZE_CAP,
    approx_decay,
    bernstein_experiment,
    democracy_experiment,
    embedding_check,
    embedding_relation,
    extremal_family,
    fit_slope,
    greedy_curve,
    greedy_order,
    greedy_select,
    jackson_experiment,
    jackson_rate,
    lacunary_family,
    normalization_weight,
    normalized_system,
    random_coefficients,
    sigma_m_oracle,
    single_term_ratio,
    unmixed_smoothness,
)
from brushlab.brushlet import BrushletIndex
from brushlab.covering import sign_magnitude_vectors
from brushlab.error import DomainError, SizeLimitError
from brushlab.mixed_norms import MixedNormParams, f_norm, sequence_norm, single_term_norm
from brushlab.transform import CoefficientSet, Truncation

ISO = Anisotropy((1, 1))
ANISO = Anisotropy((1, 2))
N_LIST = [4, 8, 16, 32]
DYADIC_N = [2**e for e in range(4, 11)]


def test_normalization_weight():
    params = MixedNormParams((2, 4), 2, 0.5, ANISO)
    # sum a_i/p_i = 1/2 + 1/2, nu = 3
    assert normalization_weight(2, params) == pytest.approx(2.0 ** (2 * (1 - 0.5 - 1.5)))
    assert normalization_weight(0, params) == 1


@pytest.mark.parametrize("p", [(2, 4), (1, math.inf), (0.5, 3)])
def test_normalized_system_is_level_independent(p):
    params = MixedNormParams(p, 2, 0.3, ANISO)
    system = normalized_system(params, Truncation(-2, 2, 1))
    norms = system.norms()
    for k in {k for _, k in norms}:
        values = [norms[(j, k)] for j in range(-2, 3)]
        np.testing.assert_allclose(values, values[0], rtol=1e-10)
    assert system.spread() >= 1
    idx = BrushletIndex(1, (2, 2), (0, 0))
    element = system.element(idx)
    assert element[idx] == pytest.approx(system.weight(idx))


def _coefficients(rng, size=10):
    return random_coefficients(Truncation(-1, 1, 3), 2, size, rng)


def test_random_coefficients(rng):
    coeffs = _coefficients(rng, 20)
    assert len(coeffs) == 20
    with pytest.raises(DomainError):
        random_coefficients(Truncation(0, 0, 1), 1, 3, rng)


def test_greedy_keeps_largest_terms(rng):
    params = MixedNormParams((2, 4), 2, 0.0, ANISO)
    coeffs = _coefficients(rng)
    order = greedy_order(coeffs, params)
    norms = [single_term_norm(idx, coeffs[idx], params) for idx in order]
    assert norms == sorted(norms, reverse=True)
    result = greedy_select(coeffs, params, 3)
    assert result.selected == tuple(order[:3])
    assert result.method == "greedy"
    assert result.error == pytest.approx(f_norm(coeffs.without(order[:3]), params))
    assert greedy_select(coeffs, params, len(coeffs)).error == 0
    with pytest.raises(DomainError):
        greedy_select(coeffs, params, -1)


def test_greedy_curve_is_monotone(rng):
    params = MixedNormParams((2, 4), 2, 0.0, ANISO)
    coeffs = _coefficients(rng)
    errors = [r.error for r in greedy_curve(coeffs, params, range(len(coeffs) + 1), "b")]
    assert all(b <= a for a, b in zip(errors, errors[1:]))
    assert errors[0] == pytest.approx(sequence_norm(coeffs, params, "b"))


def test_oracle_beats_greedy(rng):
    params = MixedNormParams((1, 3), 1.5, 0.2, ANISO)
    coeffs = _coefficients(rng, 7)
    for m in range(0, 8):
        oracle = sigma_m_oracle(coeffs, params, m)
        greedy = greedy_select(coeffs, params, m)
        assert oracle.error <= greedy.error * (1 + 1e-12)
        assert len(oracle.selected) == min(m, len(coeffs))


def test_oracle_beats_greedy_on_random_sets(rng):
    kinds = ["f", "b"]
    for trial in range(100):
        aniso = (ISO, ANISO)[trial % 2]
        params = MixedNormParams(
            (float(rng.uniform(0.5, 4)), float(rng.uniform(0.5, 4))),
            float(rng.uniform(0.5, 4)),
            float(rng.uniform(-1, 1)),
            aniso,
        )
        coeffs = _coefficients(rng, int(rng.integers(1, 7)))
        kind = kinds[trial % 2]
        for m in range(len(coeffs) + 1):
            oracle = sigma_m_oracle(coeffs, params, m, kind)
            greedy = greedy_select(coeffs, params, m, kind)
            assert oracle.error <= greedy.error * (1 + 1e-12)


def test_greedy_error_of_three_disjoint_terms():
    params = MixedNormParams((2, 2), 2, 0.0, ISO)
    values = {}
    for norm, n in zip((3, 2, 1), ((0, 0), (1, 0), (2, 0))):
        idx = BrushletIndex(0, (2, 2), n)
        values[idx] = norm / single_term_norm(idx, 1, params)
    coeffs = CoefficientSet(values, Truncation(0, 0, 3))
    assert f_norm(coeffs, params) == pytest.approx(math.sqrt(14))
    assert greedy_select(coeffs, params, 2).error == pytest.approx(1)
    assert sigma_m_oracle(coeffs, params, 2).error == pytest.approx(1)


def test_greedy_is_optimal_for_unmixed_disjoint_terms(rng):
    exponents = [0.5, 1.0, 1.5, 2.0, 3.0, math.inf]
    ks = sign_magnitude_vectors(2)
    cells = [(a, b) for a in range(4) for b in range(4)]
    for trial in range(100):
        p = exponents[trial % len(exponents)]
        params = MixedNormParams((p, p), p, float(rng.uniform(-1, 1)), (ISO, ANISO)[trial % 2])
        size = int(rng.integers(2, 9))
        chosen = rng.choice(len(cells), size, replace=False)
        coeffs = CoefficientSet(
            {
                BrushletIndex(0, ks[int(rng.integers(len(ks)))], cells[c]): complex(
                    rng.standard_normal(), rng.standard_normal()
                )
                for c in chosen
            },
            Truncation(0, 0, 4),
        )
        for m in range(size + 1):
            oracle = sigma_m_oracle(coeffs, params, m)
            greedy = greedy_select(coeffs, params, m)
            assert oracle.error == pytest.approx(greedy.error, rel=1e-9, abs=1e-12)


def test_oracle_size_cap(rng, caplog):
    params = MixedNormParams((2, 2), 2, 0.0, ISO)
    coeffs = _coefficients(rng, 5)
    with caplog.at_level(logging.WARNING, logger="brushlab.approx"):
        sigma_m_oracle(coeffs, params, 1, cap=6)
    assert "close to its cap" in caplog.text
    with pytest.raises(SizeLimitError):
        sigma_m_oracle(coeffs, params, 1, cap=4)
    assert ORACLE_SIZE_CAP == 14


def test_approx_decay(rng):
    params = MixedNormParams((2, 4), 2, 0.0, ANISO)
    coeffs = _coefficients(rng, 6)
    rows = approx_decay(coeffs, params, [0, 1, 3], "f", oracle=True)
    assert [r.m for r in rows] == [0, 1, 3]
    assert rows[0].oracle == pytest.approx(rows[0].greedy)
    assert all(r.oracle <= r.greedy * (1 + 1e-12) for r in rows)
    assert approx_decay(coeffs, params, [2])[0].oracle is None


def test_fit_slope():
    x = [1, 2, 4, 8]
    assert fit_slope(x, [3 * v**0.75 for v in x]) == pytest.approx(0.75)
    with pytest.raises(DomainError):
        fit_slope([1, 2], [1, 2])
    with pytest.raises(DomainError):
        fit_slope([1, 2, 3], [1, 0, 2])


def test_extremal_family():
    params = MixedNormParams((2, 4), 2, 0.0, ANISO)
    family = extremal_family(params, 5, 1, j=1)
    assert len(family) == 5
    assert {idx.n for idx in family} == {(0, v) for v in range(1, 6)}
    with pytest.raises(DomainError):
        extremal_family(params, 0, 0)
    with pytest.raises(DomainError):
        extremal_family(params, 3, 2)


@pytest.mark.parametrize("aniso", [ISO, ANISO])
def test_democracy_slopes(aniso):
    result = democracy_experiment((2, 4), 2, 0.0, 0, 1, N_LIST, aniso)
    assert result.slopes[0] == pytest.approx(0.5, abs=1e-9)
    assert result.slopes[1] == pytest.approx(0.25, abs=1e-9)
    assert result.predicted == (0.5, 0.25)
    with pytest.raises(DomainError):
        democracy_experiment((2, 4), 2, 0.0, 0, 0, N_LIST)


def test_democracy_mixed_exponents_along_dyadic_sizes():
    result = democracy_experiment((1, 2), 2, 0.0, 0, 1, DYADIC_N)
    assert result.slopes[0] == pytest.approx(1.0, abs=0.02)
    assert result.slopes[1] == pytest.approx(0.5, abs=0.02)


@pytest.mark.parametrize("p,q,beta", [((2, 2), 2, 0.0), ((3, 3), 1, 0.5)])
def test_democracy_unmixed_has_equal_slopes(p, q, beta):
    result = democracy_experiment(p, q, beta, 0, 1, DYADIC_N)
    assert result.slopes[0] == pytest.approx(result.slopes[1], abs=0.02)
    assert result.slopes[0] == pytest.approx(1 / p[0], abs=0.02)


@pytest.mark.parametrize("p,tau,exponent", [((4, 4), (2, 2), 0.25), ((2, 2), (1, 1), 0.5)])
def test_bernstein_unmixed(p, tau, exponent):
    result = bernstein_experiment(p, tau, 2, 2, N_LIST)
    assert result.axis == 0
    assert result.exponent == pytest.approx(exponent, abs=1e-9)
    assert result.predicted == pytest.approx(exponent)
    assert result.bound == pytest.approx(exponent)


@pytest.mark.parametrize("aniso", [ISO, ANISO])
def test_bernstein_mixed_axes(aniso):
    p, tau = (2, 4), (1, 2)
    with pytest.raises(DomainError, match="no axis"):
        bernstein_experiment(p, tau, 2, 2, N_LIST, aniso)
    first = bernstein_experiment(p, tau, 2, 2, N_LIST, aniso, axis=0)
    second = bernstein_experiment(p, tau, 2, 2, N_LIST, aniso, axis=1)
    assert first.exponent == pytest.approx(0.5, abs=1e-9)
    assert second.exponent == pytest.approx(0.25, abs=1e-9)
    assert first.bound == pytest.approx(0.75)


def test_bernstein_preconditions():
    with pytest.raises(DomainError):
        bernstein_experiment((2, 2), (2, 1), 2, 2, N_LIST)
    with pytest.raises(DomainError):
        bernstein_experiment((4, 4), (2, 2), 2, 2, [4, 8])


def test_jackson_rate():
    assert jackson_rate((1, 2), (3, 4)) == pytest.approx(1 / 2 - 1 / 3)


def test_jackson_experiment(rng):
    p, tau = (4, 4), (2, 2)
    f_params = MixedNormParams(p, 2, 0.0, ISO)
    families = [
        lacunary_family(f_params, [-1, 0, 1]),
        random_coefficients(Truncation(-1, 1, 3), 2, 8, rng),
    ]
    result = jackson_experiment(p, tau, 2, families, [0, 1, 2, 4], ISO, N_list=N_LIST)
    assert result.rate == pytest.approx(0.25)
    assert len(result.curves) == 2
    assert 0 < result.curves[0].constant < 10
    random_curve = result.curves[1]
    assert all(
        e <= b * result.constant * (1 + 1e-12)
        for e, b in zip(random_curve.errors, random_curve.bounds)
    )
    witness = result.witness
    assert witness.residual_slope == pytest.approx(0.25, abs=1e-9)
    assert witness.smoothness_slope == pytest.approx(0.5, abs=1e-9)


def test_jackson_preconditions():
    with pytest.raises(DomainError, match="tau_max < p_min"):
        jackson_experiment((2, 4), (1, 3), 2, [], [1])
    result = jackson_experiment((4, 4), (2, 2), 2, [], [1])
    assert result.witness is None
    assert result.constant == 0


def test_lacunary_family():
    params = MixedNormParams((2, 2), 2, 0.0, ISO)
    family = lacunary_family(params, [0, 2], ratio=4)
    first, second = family.indices()
    assert family[second] / family[first] == pytest.approx(
        normalization_weight(2, params) / 4
    )
    with pytest.raises(DomainError):
        lacunary_family(params, [1, 1])


def test_embedding_relations(rng):
    target = MixedNormParams((2, 4), 2, 0.5, ANISO)
    lower = MixedNormParams((2, 2), 2, unmixed_smoothness(target, 2), ANISO)
    upper = MixedNormParams((4, 4), 2, unmixed_smoothness(target, 4), ANISO)
    assert embedding_relation(target, target) == "identity"
    assert embedding_relation(lower, target) == "lower"
    assert embedding_relation(target, upper) == "upper"
    with pytest.raises(DomainError):
        embedding_relation(upper, target)
    with pytest.raises(DomainError):
        embedding_relation(target, target.with_(q=1))

    idx = BrushletIndex(1, (2, -1), (2, 0))
    single = CoefficientSet({idx: 1.5j}, Truncation(-1, 1, 3))
    for source, dest in ((lower, target), (target, upper)):
        assert embedding_check(source, dest, single) == pytest.approx(
            single_term_ratio(idx, source, dest)
        )
    coeffs = _coefficients(rng)
    assert embedding_check(target, target, coeffs, "f") == pytest.approx(1)
    with pytest.raises(DomainError):
        embedding_check(target, target, CoefficientSet({}, Truncation(0, 0, 1)))
