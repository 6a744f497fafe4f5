import numpy as np
import pytest

from brushlab.error import DomainError
from brushlab.spectrum import SampledSpectrum, dyadic_step, mesh, symmetric_grid


def test_symmetric_grid():
    grid = symmetric_grid(-1.1, 2.05, 0.25, anchors=[0, 1, -0.5])
    np.testing.assert_allclose(grid, np.arange(-4, 9) * 0.25)
    with pytest.raises(DomainError, match="not a multiple"):
        symmetric_grid(-1, 1, 0.25, anchors=[0.1])
    with pytest.raises(DomainError):
        symmetric_grid(-1, 1, 0)


def test_dyadic_step():
    assert dyadic_step(0.3) == 0.25
    assert dyadic_step(1) == 1
    assert dyadic_step(5) == 4
    with pytest.raises(DomainError):
        dyadic_step(0)


def test_sampled_spectrum():
    grids = (np.linspace(0, 1, 3), np.linspace(0, 1, 4))
    f = SampledSpectrum.sample(grids, lambda xi: xi[..., 0] + 1j * xi[..., 1])
    assert f.values.shape == (3, 4)
    assert f.d == 2
    assert f.values[2, 3] == 1 + 1j
    assert mesh(grids).shape == (3, 4, 2)
    zero = SampledSpectrum.zeros(grids)
    assert f.sup_distance(zero) == pytest.approx(abs(1 + 1j))


def test_sampled_spectrum_rejects():
    with pytest.raises(DomainError):
        SampledSpectrum((np.array([0.0, 0.0, 1.0]),), np.zeros(3))
    with pytest.raises(DomainError):
        SampledSpectrum((np.linspace(0, 1, 3),), np.zeros(4))
