"""Energy landscapes over the two rotation features at fixed elongation."""

from __future__ import annotations

import numpy as np

from .data import ANGLE_BOUND
from .models.base import EdgeEnergyModel


def energy_grid(
    model: EdgeEnergyModel,
    d: float,
    resolution: int = 41,
    angle_bound: float = ANGLE_BOUND,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Energies on a rotation-feature grid at fixed elongation ``d``.

    Returns (theta_a axis, theta_b axis, grid) with grid[i, j] the energy
    at (axis_a[i], axis_b[j], d).
    """
    if resolution < 3:
        raise ValueError(f"grid resolution must be at least 3, got {resolution}")
    axis = np.linspace(-angle_bound, angle_bound, resolution)
    ta, tb = np.meshgrid(axis, axis, indexing="ij")
    z = np.column_stack([ta.ravel(), tb.ravel(), np.full(ta.size, d)])
    grid = np.asarray(model.energy(z)).reshape(resolution, resolution)
    return axis, axis.copy(), grid


def count_local_minima(grid: np.ndarray) -> int:
    """Local minima of a 2D grid under 8-neighbour comparison.

    Cells with no strictly lower neighbour are minimum candidates;
    connected candidates of equal value count as one minimum.  (Equal
    ties do occur: a well centered between grid points of a symmetric
    grid produces a bitwise-tied pair.)  Boundary cells compare against
    the neighbours they have.
    """
    from scipy import ndimage

    grid = np.asarray(grid, dtype=float)
    padded = np.full((grid.shape[0] + 2, grid.shape[1] + 2), np.inf)
    padded[1:-1, 1:-1] = grid
    no_lower = np.ones_like(grid, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            neighbor = padded[1 + di : padded.shape[0] - 1 + di, 1 + dj : padded.shape[1] - 1 + dj]
            no_lower &= grid <= neighbor
    _, count = ndimage.label(no_lower, structure=np.ones((3, 3), dtype=int))
    return int(count)


def grid_csv(axis_a: np.ndarray, axis_b: np.ndarray, grid: np.ndarray) -> str:
    """Long-format CSV (theta_a,theta_b,energy) of one energy grid."""
    lines = ["theta_a,theta_b,energy"]
    for i, ta in enumerate(axis_a):
        for j, tb in enumerate(axis_b):
            lines.append(f"{ta:.17g},{tb:.17g},{grid[i, j]:.17g}")
    return "\n".join(lines) + "\n"
