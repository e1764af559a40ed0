"""Total lattice energy and generalized forces from per-edge energies.

The lattice is treated as a graph whose nodes carry the cross poses and
whose edges carry spring energies: every surviving edge evaluates the
energy model on its invariant feature triple, and the global energy is
the plain sum over edges.  Forces and torques follow by pulling each
edge's 3-gradient back through the feature Jacobian onto the six
endpoint degrees of freedom.

Edges are processed in fixed-size blocks in ascending index order, and
per-node accumulation happens in a single ordered pass, so results are
bitwise reproducible for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .features import DegenerateEdgeError, edge_feature_jacobian_arrays, edge_features_arrays
from .geometry import Lattice
from .models.base import EdgeEnergyModel

EDGE_BLOCK = 16384


@dataclass(frozen=True)
class EnergyGraph:
    """Per-edge energies plus their sum, with the node poses they came from."""

    total: float
    edge_energies: np.ndarray  # (n_e,)
    edges: np.ndarray  # (n_e, 2)
    positions: np.ndarray  # (n, 2)
    orientations: np.ndarray  # (n,)


@dataclass(frozen=True)
class GeneralizedForces:
    """Internal force (2-vector) and torque on every cross."""

    forces: np.ndarray  # (n, 2)
    torques: np.ndarray  # (n,)


def edge_feature_table(lattice: Lattice, positions, orientations) -> np.ndarray:
    """Feature triples of every edge, shape (n_e, 3)."""
    positions = np.asarray(positions, dtype=float)
    orientations = np.asarray(orientations, dtype=float)
    a = lattice.edges[:, 0]
    b = lattice.edges[:, 1]
    try:
        return edge_features_arrays(
            positions[a],
            orientations[a],
            positions[b],
            orientations[b],
            lattice.positions[a],
            lattice.orientations[a],
            lattice.positions[b],
            lattice.orientations[b],
        )
    except DegenerateEdgeError as exc:
        raise DegenerateEdgeError(f"degenerate edge geometry: {exc}") from exc


def assemble_energy(lattice: Lattice, positions, orientations, model: EdgeEnergyModel) -> EnergyGraph:
    """Evaluate every edge energy and aggregate the total by summation."""
    positions = np.asarray(positions, dtype=float)
    orientations = np.asarray(orientations, dtype=float)
    feats = edge_feature_table(lattice, positions, orientations)
    edge_energies = np.atleast_1d(model.energy(feats)) if len(feats) else np.zeros(0)
    return EnergyGraph(
        total=float(edge_energies.sum()),
        edge_energies=edge_energies,
        edges=lattice.edges,
        positions=positions,
        orientations=orientations,
    )


def _edge_pullback(lattice, positions, orientations, model, lo, hi, want_energy):
    """Per-edge DOF gradients (m, 6) for edges [lo, hi), plus optional energies."""
    a = lattice.edges[lo:hi, 0]
    b = lattice.edges[lo:hi, 1]
    feats = edge_features_arrays(
        positions[a],
        orientations[a],
        positions[b],
        orientations[b],
        lattice.positions[a],
        lattice.orientations[a],
        lattice.positions[b],
        lattice.orientations[b],
    )
    if want_energy:
        energies, grads = model.energy_and_gradient(feats)
    else:
        energies, grads = None, model.gradient(feats)
    jac = edge_feature_jacobian_arrays(positions[a], positions[b])
    return np.einsum("ej,eji->ei", grads, jac), energies


def assemble_generalized_forces(
    lattice: Lattice,
    positions,
    orientations,
    model: EdgeEnergyModel,
    threads: int = 1,
    _want_energy: bool = False,
):
    """Negative gradient of the total energy w.r.t. every node DOF.

    ``threads`` parallelizes the per-block edge evaluation; block
    boundaries and the final reduction order are independent of it.
    """
    positions = np.asarray(positions, dtype=float)
    orientations = np.asarray(orientations, dtype=float)
    n_nodes = lattice.n_nodes
    n_edges = lattice.n_edges
    if n_edges == 0:
        out = GeneralizedForces(np.zeros((n_nodes, 2)), np.zeros(n_nodes))
        return (out, 0.0) if _want_energy else out

    blocks = [(lo, min(lo + EDGE_BLOCK, n_edges)) for lo in range(0, n_edges, EDGE_BLOCK)]

    def work(block):
        lo, hi = block
        return _edge_pullback(lattice, positions, orientations, model, lo, hi, _want_energy)

    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, blocks))
    else:
        results = [work(block) for block in blocks]

    pullback = np.concatenate([r[0] for r in results], axis=0)
    total_energy = float(np.sum([r[1].sum() for r in results])) if _want_energy else 0.0

    a = lattice.edges[:, 0]
    b = lattice.edges[:, 1]
    forces = np.empty((n_nodes, 2))
    forces[:, 0] = -(
        np.bincount(a, weights=pullback[:, 0], minlength=n_nodes)
        + np.bincount(b, weights=pullback[:, 3], minlength=n_nodes)
    )
    forces[:, 1] = -(
        np.bincount(a, weights=pullback[:, 1], minlength=n_nodes)
        + np.bincount(b, weights=pullback[:, 4], minlength=n_nodes)
    )
    torques = -(
        np.bincount(a, weights=pullback[:, 2], minlength=n_nodes)
        + np.bincount(b, weights=pullback[:, 5], minlength=n_nodes)
    )
    out = GeneralizedForces(forces, torques)
    return (out, total_energy) if _want_energy else out


def assemble_forces_and_energy(
    lattice: Lattice, positions, orientations, model: EdgeEnergyModel, threads: int = 1
) -> tuple[GeneralizedForces, float]:
    """Forces and total energy in one pass (the model shares kernel work)."""
    return assemble_generalized_forces(
        lattice, positions, orientations, model, threads=threads, _want_energy=True
    )


def reference_residual(lattice: Lattice, model: EdgeEnergyModel) -> tuple[float, float]:
    """Largest |force| and |torque| left at the reference configuration.

    Zero for exact models; of order the fit error for trained surrogates,
    whose gradient at the reference triple need not vanish.
    """
    gf = assemble_generalized_forces(lattice, lattice.positions, lattice.orientations, model)
    force = float(np.abs(gf.forces).max()) if lattice.n_nodes else 0.0
    torque = float(np.abs(gf.torques).max()) if lattice.n_nodes else 0.0
    return force, torque


def calibrate_reference(model: EdgeEnergyModel, lattice: Lattice) -> EdgeEnergyModel:
    """Shift the model's energy so the lattice reference state has energy zero.

    Returns the shifted model; calibrating twice is a no-op.  The
    residual reference forces of trained models are not projected away;
    inspect them with ``reference_residual``.
    """
    return model.calibrated()
