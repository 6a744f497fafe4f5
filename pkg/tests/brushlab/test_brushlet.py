import math

import numpy as np
import pytest
from scipy import integrate

from brushlab.anisotropy import Anisotropy
from brushlab.bells import project_interval
from brushlab.brushlet import (
    BrushletIndex,
    HumpFrame,
    brushlet_hat,
    brushlet_hat_1d,
    brushlet_time,
    brushlet_time_1d,
    hump_bound,
    hump_offset,
    indices_in,
    project_rect,
    sign_vectors,
)
from brushlab.covering import CutoffInterval, lizorkin_level, lizorkin_rect
from brushlab.error import DomainError
from brushlab.spectrum import SampledSpectrum, symmetric_grid


def test_index_validation_and_order():
    a = BrushletIndex(0, (2, 1), (1, 0))
    b = BrushletIndex(0, (2, 1), (0, 3))
    c = BrushletIndex(-1, (2, 2), (5, 5))
    assert sorted([a, b, c]) == [c, b, a]
    assert a.d == 2
    with pytest.raises(DomainError):
        BrushletIndex(0, (1, 1), (0, 0))
    with pytest.raises(DomainError):
        BrushletIndex(0, (2, 1), (0,))
    with pytest.raises(DomainError):
        BrushletIndex(0, (2, 1), (0, -1))


def test_brushlet_hat_1d_orthonormal():
    interval = CutoffInterval(1, 3, 0.25, 0.5)
    lo, hi = interval.support
    grid = np.linspace(lo, hi, 8001)
    basis = np.stack([brushlet_hat_1d(n, interval, grid) for n in range(4)])
    gram = integrate.trapezoid(basis[:, None, :] * basis[None, :, :], grid, axis=-1)
    np.testing.assert_allclose(gram, np.eye(4), atol=1e-9)


def test_brushlet_hat_is_a_tensor_product():
    aniso = Anisotropy((1, 2))
    idx = BrushletIndex(1, (2, -1), (1, 2))
    rect = idx.rect(aniso)
    xi = np.array([[1.3, -0.7], [1.9, -0.1], [5.0, 0.0]])
    expected = brushlet_hat_1d(1, rect.intervals[0], xi[:, 0]) * brushlet_hat_1d(
        2, rect.intervals[1], xi[:, 1]
    )
    np.testing.assert_allclose(brushlet_hat(idx, aniso, xi), expected)
    assert brushlet_hat(idx, aniso, xi)[2] == 0


@pytest.mark.parametrize("n", [0, 3])
def test_brushlet_time_1d_is_the_fourier_integral(n):
    interval = CutoffInterval(1, 3, 0.25, 0.5)
    lo, hi = interval.support
    x = 0.7

    def part(wave):
        value, _ = integrate.quad(
            lambda xi: float(brushlet_hat_1d(n, interval, xi)) * wave(x * xi),
            lo,
            hi,
            limit=400,
            epsabs=1e-13,
        )
        return value

    expected = complex(part(math.cos), part(math.sin)) / math.sqrt(2 * math.pi)
    value = complex(brushlet_time_1d(n, interval, x, quad_resolution=4000, tolerance=1e-7))
    assert value == pytest.approx(expected, abs=1e-7)


def test_hump_frame():
    aniso = Anisotropy((1, 1))
    idx = BrushletIndex(0, (2, 1), (0, 1))
    frame = HumpFrame.of(idx, aniso)
    np.testing.assert_allclose(frame.delta, [0.5, 0.5])
    np.testing.assert_allclose(frame.offsets, [math.pi, 3 * math.pi])
    assert frame.centers.shape == (4, 2)
    assert hump_offset(0, CutoffInterval(0, 0.5, 0.1, 0.1)) == pytest.approx(math.pi)
    assert sign_vectors(3).shape == (8, 3)


def test_hump_bound_dominates_the_brushlet(rng):
    aniso = Anisotropy((1, 2))
    idx = BrushletIndex(0, (2, 1), (1, 0))
    x = rng.uniform(-10, 10, (20, 2))
    kwargs = dict(quad_resolution=2000, tolerance=1e-6)
    value = np.abs(brushlet_time(idx, aniso, x, **kwargs))
    bound = hump_bound(idx, aniso, x, **kwargs)
    assert np.all(value <= 2 ** (idx.d / 2) * bound + 1e-9)


def test_indices_in():
    aniso = Anisotropy((1, 1))
    rects = lizorkin_level(0, aniso)
    indices = indices_in(rects, 3)
    assert len(indices) == 12 * 9
    assert len(set(indices)) == len(indices)


def test_project_rect_acts_axis_by_axis(rng):
    grid = symmetric_grid(-2, 3, 1 / 64, anchors=[0, 0.5, 1])
    rect = lizorkin_rect(0, (2, 1), Anisotropy((1, 1)))
    first = rng.standard_normal(len(grid)) + 1j * rng.standard_normal(len(grid))
    second = rng.standard_normal(len(grid))
    projected = project_rect(
        SampledSpectrum((grid, grid), np.outer(first, second)), rect
    )
    along = [
        project_interval(SampledSpectrum((grid,), values), interval).values
        for values, interval in zip((first, second), rect.intervals)
    ]
    np.testing.assert_allclose(projected.values, np.outer(*along), atol=1e-12)
    with pytest.raises(DomainError):
        project_rect(SampledSpectrum((grid,), first), rect)
