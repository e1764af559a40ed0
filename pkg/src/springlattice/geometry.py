"""Pore-shape geometry and cross-spring lattice construction.

A lattice is a rectangular grid of rigid crosses (one per unit cell)
joined to their four neighbours by nonlinear springs.  The pore contour
of a cell is a four-fold symmetric perturbation of a circle; its shape
parameter and porosity fix the base radius and the solid mass per cell.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

HORIZONTAL = "h"
VERTICAL = "v"


@dataclass(frozen=True)
class PoreShape:
    """Four-fold symmetric pore contour r(alpha) = r0 * (1 + xi*cos(4*alpha)).

    xi:   dimensionless shape parameter (|xi| < 1 keeps the radius positive)
    phi0: initial porosity, the pore-area fraction of the cell (0 < phi0 < 1)
    l0:   unit-cell side length
    """

    xi: float
    phi0: float
    l0: float = 1.0


def base_radius(shape: PoreShape) -> float:
    """Base radius r0 giving pore-area fraction phi0 for the given shape."""
    return shape.l0 * np.sqrt(2.0 * shape.phi0) / np.sqrt(np.pi * (2.0 + shape.xi**2))


def pore_radius(shape: PoreShape, alpha):
    """Polar radius of the pore contour at polar angle(s) ``alpha``."""
    return base_radius(shape) * (1.0 + shape.xi * np.cos(4.0 * np.asarray(alpha)))


@dataclass(frozen=True)
class ShapeCheck:
    name: str
    passed: bool
    worst_alpha: float
    margin: float


@dataclass(frozen=True)
class ShapeReport:
    ok: bool
    checks: tuple[ShapeCheck, ...]

    def failures(self) -> tuple[ShapeCheck, ...]:
        return tuple(c for c in self.checks if not c.passed)


def validate_pore_shape(shape: PoreShape, samples: int = 720) -> ShapeReport:
    """Check a pore shape against its geometric invariants.

    Two sweep-based checks are evaluated on a dense grid of polar angles
    (``samples`` >= 360): the radius must stay strictly positive, and the
    contour must stay strictly inside the unit cell (positive ligament).
    Failures are reported with the worst-case angle, never raised.
    """
    samples = max(int(samples), 360)
    checks = []

    params_ok = 0.0 < shape.phi0 < 1.0 and shape.l0 > 0.0 and np.isfinite(shape.xi)
    checks.append(ShapeCheck("parameters", params_ok, np.nan, 0.0))

    alpha = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    r = pore_radius(shape, alpha)

    i_min = int(np.argmin(r))
    checks.append(
        ShapeCheck("radius-positivity", bool(r[i_min] > 0.0), float(alpha[i_min]), float(r[i_min]))
    )

    # Containment: the contour point at angle alpha lies inside the square
    # cell iff r(alpha) < l0 / (2 * max(|cos|, |sin|)).
    bound = shape.l0 / (2.0 * np.maximum(np.abs(np.cos(alpha)), np.abs(np.sin(alpha))))
    gap = bound - r
    i_worst = int(np.argmin(gap))
    checks.append(
        ShapeCheck("containment", bool(gap[i_worst] > 0.0), float(alpha[i_worst]), float(gap[i_worst]))
    )

    checks = tuple(checks)
    return ShapeReport(all(c.passed for c in checks), checks)


@dataclass(frozen=True)
class LatticeSpec:
    """Grid size, pore shape, and the solid's area density.

    ``cross_inertia`` overrides the solid-square default I = m * l0**2 / 6.
    """

    rows: int
    cols: int
    shape: PoreShape
    density: float = 1.0
    cross_inertia: float | None = None


@dataclass(frozen=True)
class Lattice:
    """Immutable reference geometry and topology of a cross-spring grid.

    Nodes sit at (col * l0, row * l0) with node index ``row * cols + col``.
    Edges are canonical: endpoint indices are ordered a < b and the edge
    list is sorted lexicographically.
    """

    rows: int
    cols: int
    l0: float
    positions: np.ndarray  # (n, 2) reference positions
    orientations: np.ndarray  # (n,) reference orientations, radians
    masses: np.ndarray  # (n,)
    inertias: np.ndarray  # (n,)
    edges: np.ndarray  # (n_e, 2) int64, a < b

    def __post_init__(self):
        for name in ("positions", "orientations", "masses", "inertias", "edges"):
            arr = getattr(self, name)
            arr.flags.writeable = False

    @property
    def n_nodes(self) -> int:
        return self.positions.shape[0]

    @property
    def n_edges(self) -> int:
        return self.edges.shape[0]

    @property
    def reference_lengths(self) -> np.ndarray:
        """Per-edge reference length |x_b^ref - x_a^ref|."""
        delta = self.positions[self.edges[:, 1]] - self.positions[self.edges[:, 0]]
        return np.hypot(delta[:, 0], delta[:, 1])

    @property
    def reference_angles(self) -> np.ndarray:
        """Per-edge reference polar angle of x_b^ref - x_a^ref."""
        delta = self.positions[self.edges[:, 1]] - self.positions[self.edges[:, 0]]
        return np.arctan2(delta[:, 1], delta[:, 0])

    def node_index(self, row: int, col: int) -> int:
        if not (0 <= row < self.rows and 0 <= col < self.cols):
            raise IndexError(f"node ({row}, {col}) outside {self.rows}x{self.cols} grid")
        return row * self.cols + col

    def row_nodes(self, row: int) -> np.ndarray:
        """Node indices of one grid row (row 0 is the bottom)."""
        if not 0 <= row < self.rows:
            raise IndexError(f"row {row} outside {self.rows}x{self.cols} grid")
        return np.arange(row * self.cols, (row + 1) * self.cols)

    def to_dict(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "l0": self.l0,
            "positions": self.positions.tolist(),
            "orientations": self.orientations.tolist(),
            "masses": self.masses.tolist(),
            "inertias": self.inertias.tolist(),
            "edges": self.edges.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Lattice":
        return cls(
            rows=int(doc["rows"]),
            cols=int(doc["cols"]),
            l0=float(doc["l0"]),
            positions=np.asarray(doc["positions"], dtype=float),
            orientations=np.asarray(doc["orientations"], dtype=float),
            masses=np.asarray(doc["masses"], dtype=float),
            inertias=np.asarray(doc["inertias"], dtype=float),
            edges=np.asarray(doc["edges"], dtype=np.int64).reshape(-1, 2),
        )


def grid_edge_count(rows: int, cols: int) -> int:
    """Edge count of a full rows x cols grid with 4-neighbour connectivity."""
    return rows * (cols - 1) + (rows - 1) * cols


def build_lattice(spec: LatticeSpec) -> Lattice:
    """Construct the full grid lattice described by ``spec``.

    Raises ValueError if the spec or its pore shape is invalid.
    """
    problems = []
    if spec.rows < 1 or spec.cols < 1:
        problems.append(f"grid size {spec.rows}x{spec.cols} must be at least 1x1")
    if not spec.density > 0.0:
        problems.append(f"density {spec.density} must be positive")
    if spec.cross_inertia is not None and not spec.cross_inertia > 0.0:
        problems.append(f"cross_inertia {spec.cross_inertia} must be positive")
    report = validate_pore_shape(spec.shape)
    for check in report.failures():
        problems.append(f"pore shape fails {check.name} (margin {check.margin:.3g})")
    if problems:
        raise ValueError("invalid lattice spec: " + "; ".join(problems))

    rows, cols, l0 = spec.rows, spec.cols, spec.shape.l0
    n = rows * cols
    jj, ii = np.meshgrid(np.arange(cols), np.arange(rows))
    positions = np.column_stack([jj.ravel() * l0, ii.ravel() * l0]).astype(float)

    edges = []
    for i in range(rows):
        for j in range(cols):
            node = i * cols + j
            if j + 1 < cols:
                edges.append((node, node + 1))
            if i + 1 < rows:
                edges.append((node, node + cols))
    edges = np.asarray(sorted(edges), dtype=np.int64).reshape(-1, 2)

    mass = spec.density * l0**2 * (1.0 - spec.shape.phi0)
    inertia = mass * l0**2 / 6.0 if spec.cross_inertia is None else spec.cross_inertia

    return Lattice(
        rows=rows,
        cols=cols,
        l0=l0,
        positions=positions,
        orientations=np.zeros(n),
        masses=np.full(n, mass),
        inertias=np.full(n, inertia),
        edges=edges,
    )


@dataclass(frozen=True)
class EdgeListDefects:
    """Remove an explicit set of grid edges, given as (a, b) node pairs."""

    edges: tuple[tuple[int, int], ...]

    @classmethod
    def of(cls, pairs: Iterable[Sequence[int]]) -> "EdgeListDefects":
        return cls(tuple(tuple(sorted((int(a), int(b)))) for a, b in pairs))


@dataclass(frozen=True)
class PeriodicDefects:
    """Remove the same edges from every block of a block_rows x block_cols tiling.

    Each removed offset is (row_offset, col_offset, orientation) naming the
    edge whose lower endpoint is the node at that offset inside the block;
    orientation "h" points to the next column, "v" to the next row.  Edges
    that a partial block at the grid boundary would place outside the grid
    are skipped.
    """

    block_rows: int
    block_cols: int
    removed: tuple[tuple[int, int, str], ...]


DefectPattern = EdgeListDefects | PeriodicDefects | None


def _grid_edge_pairs(lattice: Lattice, pattern: DefectPattern) -> set[tuple[int, int]]:
    """Resolve a defect pattern to canonical (a, b) pairs of the full grid."""
    rows, cols = lattice.rows, lattice.cols

    def is_grid_edge(a: int, b: int) -> bool:
        if not (0 <= a < rows * cols and 0 <= b < rows * cols and a < b):
            return False
        return b - a == cols or (b - a == 1 and a // cols == b // cols)

    if isinstance(pattern, EdgeListDefects):
        pairs = set()
        for a, b in pattern.edges:
            a, b = sorted((int(a), int(b)))
            if not is_grid_edge(a, b):
                raise ValueError(f"unknown edge reference ({a}, {b}) for {rows}x{cols} grid")
            pairs.add((a, b))
        return pairs

    if isinstance(pattern, PeriodicDefects):
        if pattern.block_rows < 1 or pattern.block_cols < 1:
            raise ValueError("defect block dimensions must be at least 1x1")
        pairs = set()
        for di, dj, orient in pattern.removed:
            if orient not in (HORIZONTAL, VERTICAL):
                raise ValueError(f"unknown edge orientation {orient!r}")
            if not (0 <= di < pattern.block_rows and 0 <= dj < pattern.block_cols):
                raise ValueError(f"offset ({di}, {dj}) outside {pattern.block_rows}x{pattern.block_cols} block")
            for bi in range(0, rows, pattern.block_rows):
                for bj in range(0, cols, pattern.block_cols):
                    i, j = bi + di, bj + dj
                    if orient == HORIZONTAL:
                        i2, j2 = i, j + 1
                    else:
                        i2, j2 = i + 1, j
                    if i2 >= rows or j2 >= cols or i >= rows or j >= cols:
                        continue
                    pairs.add((i * cols + j, i2 * cols + j2))
        return pairs

    raise TypeError(f"unsupported defect pattern {type(pattern).__name__}")


def apply_defects(lattice: Lattice, pattern: DefectPattern) -> Lattice:
    """Return a copy of ``lattice`` with the pattern's edges removed.

    Nodes are untouched and edge ordering is preserved.  Removing an edge
    that an earlier application already removed is a no-op, so applying a
    fixed pattern twice equals applying it once.  Referencing a pair that
    never was a grid edge raises ValueError.
    """
    if pattern is None:
        return lattice
    removed = _grid_edge_pairs(lattice, pattern)
    if not removed:
        return lattice
    keep = np.array([(int(a), int(b)) not in removed for a, b in lattice.edges], dtype=bool)
    return replace(lattice, edges=lattice.edges[keep].copy())
