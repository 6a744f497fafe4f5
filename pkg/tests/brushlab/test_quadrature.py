import math

import numpy as np
import pytest

from brushlab import quadrature
from brushlab.bells import BellFunction
from brushlab.covering import CutoffInterval
from brushlab.error import AccuracyError, DomainError


def test_step_for():
    assert quadrature.step_for(0.5, 10) == 0.05
    assert quadrature.step_for(0.5, 10, max_frequency=100) == pytest.approx(
        2 * math.pi / 800
    )
    with pytest.raises(DomainError):
        quadrature.step_for(0, 10)


def test_nodes_have_even_interval_count():
    grid = quadrature.nodes(0, 1, 0.3)
    assert (len(grid) - 1) % 2 == 0
    assert np.max(np.diff(grid)) <= 0.3
    assert grid[0] == 0 and grid[-1] == 1
    with pytest.raises(DomainError):
        quadrature.nodes(1, 1, 0.1)


def test_weights():
    grid = quadrature.nodes(-1, 3, 0.1)
    assert quadrature.weights(grid).sum() == pytest.approx(4)
    fine, coarse = quadrature.paired_weights(grid)
    assert fine.sum() == pytest.approx(4)
    assert coarse.sum() == pytest.approx(4)
    assert np.all(coarse[1::2] == 0)


def test_trapezoid_of_a_bell_squared():
    # b^2 integrates to the interval length
    interval = CutoffInterval(0, 2, 0.5, 0.5)
    grid = quadrature.nodes(-0.5, 2.5, 0.5 / 160)
    values = BellFunction(interval)(grid) ** 2
    assert quadrature.trapezoid(values, grid) == pytest.approx(2, abs=1e-12)


def test_trapezoid_verification():
    grid = quadrature.nodes(0, 1, 0.25)
    with pytest.raises(AccuracyError, match="halving the step"):
        quadrature.trapezoid(grid**3, grid, tolerance=1e-6)
    assert quadrature.trapezoid(grid**3, grid, tolerance=None) > 0.25


def test_verify():
    quadrature.verify(np.ones(3), np.ones(3) + 1e-12, 1e-9, "ok")
    with pytest.raises(AccuracyError):
        quadrature.verify(np.ones(3), np.zeros(3), 1e-9, "bad")
