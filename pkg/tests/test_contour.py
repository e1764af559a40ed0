import numpy as np
import pytest

from springlattice import AnalyticOracle
from springlattice.contour import count_local_minima, energy_grid, grid_csv


class TestCountLocalMinima:
    def test_single_bowl(self):
        x = np.linspace(-1, 1, 21)
        grid = x[:, None] ** 2 + x[None, :] ** 2
        assert count_local_minima(grid) == 1

    def test_two_wells(self):
        x = np.linspace(-1.5, 1.5, 41)
        grid = (x[:, None] ** 2 - 1.0) ** 2 + 0.5 * x[None, :] ** 2
        assert count_local_minima(grid) == 2

    def test_monotone_plane_has_one_corner_minimum(self):
        x = np.linspace(0, 1, 11)
        grid = x[:, None] + 2 * x[None, :]
        assert count_local_minima(grid) == 1


class TestEnergyGrid:
    def test_bistable_minima_counts(self):
        model = AnalyticOracle.bistable()
        _, _, compressed = energy_grid(model, d=-0.2, resolution=61)
        _, _, stretched = energy_grid(model, d=+0.2, resolution=61)
        assert count_local_minima(compressed) == 2
        assert count_local_minima(stretched) == 1

    def test_grid_matches_direct_evaluation(self):
        model = AnalyticOracle.bistable()
        axis_a, axis_b, grid = energy_grid(model, d=0.1, resolution=5)
        assert grid[1, 3] == model.energy([axis_a[1], axis_b[3], 0.1])

    def test_resolution_validation(self):
        with pytest.raises(ValueError, match="resolution"):
            energy_grid(AnalyticOracle.bistable(), d=0.0, resolution=2)


def test_grid_csv_round_trips():
    model = AnalyticOracle.bistable()
    axis_a, axis_b, grid = energy_grid(model, d=-0.05, resolution=4)
    text = grid_csv(axis_a, axis_b, grid)
    lines = text.strip().splitlines()
    assert lines[0] == "theta_a,theta_b,energy"
    assert len(lines) == 1 + 16
    ta, tb, e = (float(v) for v in lines[1].split(","))
    assert (ta, tb, e) == (axis_a[0], axis_b[0], grid[0, 0])
