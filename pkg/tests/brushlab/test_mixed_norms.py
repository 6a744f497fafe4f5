import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from brushlab.anisotropy import Anisotropy
from brushlab.approx import random_coefficients
from brushlab.brushlet import BrushletIndex
from brushlab.covering import sign_magnitude_vectors
from brushlab.error import DomainError
from brushlab.mixed_norms import (
    GridFunction,
    MixedNormParams,
    arrangement,
    b_norm,
    f_norm,
    fefferman_stein_ratio,
    iterated_maximal,
    lq_combine,
    maxbound_ratio,
    maximal_1d,
    mixed_lp,
    peetre_constant,
    sequence_norm,
    single_term_norm,
    vector_lq_norm,
)
from brushlab.test import assert_close, brute_force_norm, coefficient_set
from brushlab.transform import CoefficientSet, Truncation

ANISO = Anisotropy((1, 2))


def params(p=(2, 4), q=2, s=0.0, aniso=ANISO):
    return MixedNormParams(tuple(p), q, s, aniso)


def test_params_validation():
    with pytest.raises(DomainError):
        params(p=(0, 2))
    with pytest.raises(DomainError):
        params(p=(2,))
    with pytest.raises(DomainError):
        params(q=-1)
    with pytest.raises(DomainError):
        params(s=math.inf)
    assert params(p=(2, math.inf)).p_max == math.inf
    assert params(p=(3, 3)).is_unmixed
    assert params().with_(q=1).q == 1


def test_grid_function():
    f = GridFunction((np.array([0, 1, 3]), np.array([0, 2])), np.array([[1.0], [2.0]]))
    np.testing.assert_allclose(f.cell_volumes(), [[2], [4]])
    np.testing.assert_allclose(f.evaluate([[0.5, 1], [2, 1], [3, 2], [4, 1]]), [1, 2, 2, 0])
    refined = f.on_edges([np.array([0.5]), np.array([1.0])])
    assert refined.values.shape == (3, 2)
    assert mixed_lp(refined, (1, 1)) == pytest.approx(mixed_lp(f, (1, 1)))
    with pytest.raises(DomainError):
        GridFunction((np.array([0, 0]),), np.array([1.0]))
    with pytest.raises(DomainError):
        GridFunction((np.array([0, 1]),), np.array([1.0, 2.0]))


def test_mixed_lp_order_of_integration():
    # inner exponent acts on axis 0, outer on axis 1
    f = GridFunction(
        (np.array([0, 1, 2]), np.array([0, 1, 2])), np.array([[1.0, 0.0], [1.0, 2.0]])
    )
    inner_first = mixed_lp(f, (1, math.inf))
    assert inner_first == pytest.approx(2)
    assert mixed_lp(f, (math.inf, 1)) == pytest.approx(3)
    assert mixed_lp(f, (2, 2)) == pytest.approx(math.sqrt(6))
    with pytest.raises(DomainError):
        mixed_lp(f, (2,))


def test_lq_combine_and_vector_norm():
    np.testing.assert_allclose(lq_combine([np.array([3.0]), np.array([4.0])], 2), [5])
    np.testing.assert_allclose(lq_combine([np.array([3.0]), np.array([-4.0])], math.inf), [4])
    edges = (np.array([0.0, 1.0]),)
    family = [GridFunction(edges, np.array([3.0])), GridFunction(edges, np.array([4.0]))]
    assert vector_lq_norm(family, (1,), 2) == pytest.approx(5)
    with pytest.raises(DomainError):
        vector_lq_norm([], (1,), 2)
    with pytest.raises(DomainError):
        vector_lq_norm(
            family + [GridFunction((np.array([0.0, 2.0]),), np.array([1.0]))], (1,), 2
        )


def test_maximal_1d():
    f = GridFunction((np.array([0.0, 1.0, 2.0, 4.0]),), np.array([0.0, 3.0, 1.0]))
    assert maximal_1d(f, 0, [1.5]) == pytest.approx(3)
    assert maximal_1d(f, 0, [0.5]) == pytest.approx(1.5)
    # outside the grid the windows end at x
    assert maximal_1d(f, 0, [6.0]) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        maximal_1d(f, 1, [0.5])


def test_iterated_maximal_dominates_and_matches_1d(rng):
    edges = (np.linspace(0, 4, 9), np.linspace(-1, 1, 5))
    f = GridFunction(edges, rng.standard_normal((8, 4)))
    m = iterated_maximal(f)
    assert np.all(m.values >= np.abs(f.values) - 1e-12)
    single = GridFunction((edges[0],), f.values[:, 0])
    centers = 0.5 * (edges[0][1:] + edges[0][:-1])
    np.testing.assert_allclose(
        iterated_maximal(single).values,
        [maximal_1d(single, 0, [c]) for c in centers],
    )
    with pytest.raises(DomainError):
        iterated_maximal(f, 0)


def test_iterated_maximal_theta():
    f = GridFunction((np.array([0.0, 1.0, 2.0]),), np.array([4.0, 0.0]))
    assert iterated_maximal(f, 0.5).values[1] == pytest.approx(1.0)
    assert iterated_maximal(f, 1.0).values[1] == pytest.approx(2.0)


def test_single_term_norm_closed_form():
    idx = BrushletIndex(1, (2, 1), (0, 3))
    p = params(p=(2, 4), q=3, s=0.5)
    coeffs = CoefficientSet({idx: 2 - 1j}, Truncation(0, 2, 4))
    expected = single_term_norm(idx, 2 - 1j, p)
    assert f_norm(coeffs, p) == pytest.approx(expected)
    assert b_norm(coeffs, p) == pytest.approx(expected)


@pytest.mark.parametrize(
    "p,q,s",
    [
        ((2, 4), 2, 0.0),
        ((1, 1), 1, 0.3),
        ((0.5, 3), 0.7, -0.2),
        ((math.inf, 2), math.inf, 0.0),
        ((4, math.inf), 1.5, 1.0),
    ],
)
def test_norms_match_brute_force(p, q, s, rng):
    truncation = Truncation(-1, 1, 3)
    values = {}
    for j, k, n in [
        (0, (2, 1), (0, 0)),
        (0, (2, 1), (1, 2)),
        (1, (2, 2), (0, 0)),
        (1, (-1, 2), (2, 1)),
        (-1, (2, -2), (0, 1)),
        (0, (1, 2), (0, 0)),
    ]:
        values[(j, k, n)] = complex(rng.standard_normal(), rng.standard_normal())
    coeffs = coefficient_set(values, truncation)
    prm = params(p=p, q=q, s=s)
    assert f_norm(coeffs, prm) == pytest.approx(brute_force_norm(coeffs, prm, "f"), rel=1e-9)
    assert b_norm(coeffs, prm) == pytest.approx(brute_force_norm(coeffs, prm, "b"), rel=1e-9)


def test_norms_match_brute_force_on_random_sets(rng):
    exponents = [0.5, 1.0, 1.5, 2.0, 3.0, math.inf]
    anisotropies = [(1.0,), (2.0,), (1.0, 1.0), (1.0, 2.0), (1.5, 1.0)]
    truncation = Truncation(-1, 1, 3)
    for _ in range(50):
        aniso = Anisotropy(anisotropies[rng.integers(len(anisotropies))])
        size = int(rng.integers(1, 13))
        coeffs = random_coefficients(truncation, aniso.d, size, rng)
        prm = MixedNormParams(
            tuple(rng.choice(exponents, aniso.d)),
            rng.choice(exponents),
            rng.uniform(-1, 1),
            aniso,
        )
        assert_close(
            [f_norm(coeffs, prm), b_norm(coeffs, prm)],
            [brute_force_norm(coeffs, prm, "f"), brute_force_norm(coeffs, prm, "b")],
            rtol=1e-6,
        )


def test_norm_properties(rng):
    truncation = Truncation(-1, 1, 4)
    values = {
        (j, (2, 2), (n, 0)): complex(rng.standard_normal())
        for j in (-1, 0, 1)
        for n in range(3)
    }
    coeffs = coefficient_set(values, truncation)
    prm = params()
    assert f_norm(coeffs.scaled(-3), prm) == pytest.approx(3 * f_norm(coeffs, prm))
    smaller = coeffs.without(coeffs.indices()[:2])
    assert f_norm(smaller, prm) <= f_norm(coeffs, prm)
    assert b_norm(smaller, prm) <= b_norm(coeffs, prm)
    assert sequence_norm(CoefficientSet({}, truncation), prm) == 0
    with pytest.raises(DomainError):
        sequence_norm(coeffs, prm, "g")
    with pytest.raises(DomainError):
        f_norm(coeffs, params(p=(2,), aniso=Anisotropy((1,))))


EXPONENTS = st.sampled_from([0.5, 0.75, 1.0, 1.5, 2.0, 4.0, math.inf])
TRUNCATION = Truncation(-1, 1, 3)
INDICES = st.builds(
    BrushletIndex,
    st.integers(-1, 1),
    st.sampled_from(sign_magnitude_vectors(2)),
    st.tuples(st.integers(0, 2), st.integers(0, 2)),
)
VALUES = st.complex_numbers(
    min_magnitude=1e-3, max_magnitude=1e3, allow_nan=False, allow_infinity=False
)
COEFFICIENT_SETS = st.dictionaries(INDICES, VALUES, min_size=1, max_size=8).map(
    lambda values: CoefficientSet(values, TRUNCATION)
)
ANISOTROPIES = st.sampled_from(
    [Anisotropy((1, 1)), Anisotropy((1, 2)), Anisotropy((1.5, 1))]
)
PARAMS = st.builds(
    MixedNormParams,
    st.tuples(EXPONENTS, EXPONENTS),
    EXPONENTS,
    st.floats(-1, 1),
    ANISOTROPIES,
)


@given(coeffs=COEFFICIENT_SETS, prm=PARAMS, data=st.data())
def test_norms_ignore_signs(coeffs, prm, data):
    size = len(coeffs)
    signs = data.draw(st.lists(st.sampled_from([1, -1]), min_size=size, max_size=size))
    flipped = CoefficientSet(
        {idx: sign * c for (idx, c), sign in zip(coeffs.items(), signs)}, TRUNCATION
    )
    assert f_norm(flipped, prm) == f_norm(coeffs, prm)
    assert b_norm(flipped, prm) == b_norm(coeffs, prm)


@given(first=COEFFICIENT_SETS, second=COEFFICIENT_SETS, prm=PARAMS)
def test_quasi_triangle_inequality(first, second, prm):
    constant = 2 ** (1 / min(min(prm.p), prm.q, 1) - 1)
    total = first.combine(second)
    for norm in (f_norm, b_norm):
        bound = constant * (norm(first, prm) + norm(second, prm))
        assert norm(total, prm) <= bound * (1 + 1e-9) + 1e-12


@given(data=st.data(), p=EXPONENTS, q=EXPONENTS, s=st.floats(-1, 1))
def test_unmixed_norm_ignores_the_arrangement_of_values(data, p, q, s):
    # same level isotropic cells with distinct n are disjoint and congruent
    n = data.draw(
        st.lists(
            st.tuples(st.integers(0, 2), st.integers(0, 2)), min_size=2, max_size=6, unique=True
        )
    )
    size = len(n)
    j = data.draw(st.integers(-1, 1))
    ks = data.draw(
        st.lists(st.sampled_from(sign_magnitude_vectors(2)), min_size=size, max_size=size)
    )
    values = data.draw(st.lists(VALUES, min_size=size, max_size=size))
    shuffled = data.draw(st.permutations(values))
    indices = [BrushletIndex(j, k, cell) for k, cell in zip(ks, n)]
    prm = params(p=(p, p), q=q, s=s, aniso=Anisotropy((1, 1)))
    original = CoefficientSet(dict(zip(indices, values)), TRUNCATION)
    reordered = CoefficientSet(dict(zip(indices, shuffled)), TRUNCATION)
    assert f_norm(reordered, prm) == pytest.approx(f_norm(original, prm), rel=1e-12)


def test_rectangle_average_is_bounded_by_the_maximal_function(rng):
    edges = (np.sort(rng.uniform(0, 10, 13)), np.sort(rng.uniform(-3, 3, 9)))
    f = GridFunction(edges, rng.standard_normal((12, 8)))
    maximal = iterated_maximal(f).values
    volumes = f.cell_volumes()
    for _ in range(100):
        first = np.sort(rng.choice(13, 2, replace=False))
        second = np.sort(rng.choice(9, 2, replace=False))
        box = (slice(*first), slice(*second))
        average = np.sum(np.abs(f.values[box]) * volumes[box]) / np.sum(volumes[box])
        assert np.all(maximal[box] >= average * (1 - 1e-12))


def test_arrangement_q_inf():
    lower = np.array([[0.0], [1.0]])
    upper = np.array([[2.0], [3.0]])
    g = arrangement(lower, upper, np.array([1.0, 2.0]), math.inf)
    np.testing.assert_allclose(g.values, [1, 2, 2])
    g = arrangement(lower, upper, np.array([3.0, 4.0]), 2)
    np.testing.assert_allclose(g.values, [3, 5, 4])


def _midpoints(cells):
    edges = np.linspace(0, 8, cells + 1)
    mids = 0.5 * (edges[1:] + edges[:-1])
    return (edges, edges), np.meshgrid(mids, mids, indexing="ij")


def test_fefferman_stein_constant_is_stable_under_refinement(rng):
    families = [
        [(rng.uniform(2, 6, 2), rng.uniform(0.8, 1.5), rng.standard_normal()) for _ in range(3)]
        for _ in range(20)
    ]

    def constant(cells):
        edges, (x, y) = _midpoints(cells)
        ratios = []
        for family in families:
            members = [
                GridFunction(
                    edges,
                    amplitude * np.exp(-((x - c[0]) ** 2 + (y - c[1]) ** 2) / (2 * width**2)),
                )
                for c, width, amplitude in family
            ]
            ratios.append(fefferman_stein_ratio(members, 0.5, (2, 3), 2))
        return max(ratios)

    coarse = constant(64)
    fine = constant(128)
    assert coarse >= 1
    assert fine / coarse == pytest.approx(1, rel=0.1)


def test_fefferman_stein_ratio_rejects_zero_family():
    edges = (np.linspace(0, 8, 17), np.linspace(0, 4, 9))
    zero = [GridFunction(edges, np.zeros((16, 8)))]
    with pytest.raises(DomainError):
        fefferman_stein_ratio(zero, 1, (2, 2), 2)


def test_peetre_constant_is_stable_under_refinement():
    aniso = Anisotropy((1, 1))

    def sample(step):
        edges = np.arange(-4, 4 + step / 2, step)
        mids = 0.5 * (edges[1:] + edges[:-1])
        x, y = np.meshgrid(mids, mids, indexing="ij")
        values = np.exp(-((x - 0.3) ** 2 + (y + 0.2) ** 2) / 2)
        return GridFunction((edges, edges), values)

    coarse = peetre_constant(sample(0.25), 0, aniso, 1.0)
    fine = peetre_constant(sample(0.125), 0, aniso, 1.0)
    assert 0 < coarse < 20
    assert fine / coarse == pytest.approx(1, rel=0.1)


def _single_rect(j):
    return CoefficientSet(
        {
            BrushletIndex(j, (2, 1), (0, 0)): 1.0,
            BrushletIndex(j, (2, 1), (1, 0)): -0.5j,
        },
        Truncation(0, 1, 2),
    )


@pytest.mark.parametrize("a", [(1.0, 1.0), (1.0, 2.0)])
def test_maxbound_ratio_is_invariant_under_dilation(a, rng):
    aniso = Anisotropy(a)
    points = np.vstack((rng.uniform(-4, 4, (30, 2)), [[-5.0, -5.0], [5.0, 5.0]]))
    scaled = points * np.power(2.0, -aniso.as_array())
    level0 = maxbound_ratio(_single_rect(0), aniso, points, tolerance=1e-6)
    level1 = maxbound_ratio(_single_rect(1), aniso, scaled, tolerance=1e-6)
    assert 0 < level0 < math.inf
    assert level1 == pytest.approx(level0, rel=1e-9)


def test_maxbound_ratio_is_stable_under_refinement():
    aniso = Anisotropy((1, 1))

    def ratio(step):
        axis = np.arange(-4, 4 + step / 2, step)
        x, y = np.meshgrid(axis, axis, indexing="ij")
        points = np.column_stack((x.ravel(), y.ravel()))
        return maxbound_ratio(_single_rect(0), aniso, points, tolerance=1e-6)

    coarse = ratio(0.125)
    fine = ratio(0.0625)
    assert 0 < coarse < math.inf
    assert fine / coarse == pytest.approx(1, rel=0.1)


def test_maxbound_ratio_rejects(rng):
    aniso = Anisotropy((1, 1))
    points = rng.uniform(-6, 6, (10, 2))
    mixed = CoefficientSet(
        {BrushletIndex(0, (2, 1), (0, 0)): 1.0, BrushletIndex(0, (2, 2), (0, 0)): 1.0},
        Truncation(0, 0, 2),
    )
    with pytest.raises(DomainError, match="exactly one rectangle"):
        maxbound_ratio(mixed, aniso, points)
    with pytest.raises(DomainError):
        maxbound_ratio(_single_rect(0), aniso, points, r=2.0)
