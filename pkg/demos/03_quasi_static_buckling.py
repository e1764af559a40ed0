"""Quasi-static loading: uniaxial tests and compression-driven buckling.

A spring with a bistable energy landscape stays straight under tension
but snaps into a rotated configuration once compressed.  A column of
such springs, compressed between grips, buckles into a counter-rotating
pattern; heavily damped dynamics relax the structure into the well.
Outputs: SVG snapshots of stretched, compressed, and buckled states.
"""

import pathlib

import numpy as np

import springlattice as sl

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

shape = sl.PoreShape(xi=0.0, phi0=0.5, l0=1.0)
model = sl.AnalyticOracle.bistable()

# --- 4x4 sheet under 10% tension and compression ---------------------------
lattice = sl.build_lattice(sl.LatticeSpec(rows=4, cols=4, shape=shape))
for label, strain in (("tension", 0.10), ("compression", -0.10)):
    protocol = sl.make_protocol("uniaxial", lattice, strain=strain, axis=1)
    result = sl.quasi_static_relax(
        lattice, model, protocol, damping=sl.Damping(2.0, 0.2),
        perturb_orientations=1e-2, seed=1, max_steps=400_000,
    )
    energy = sl.assemble_energy(
        lattice, result.state.positions, result.state.orientations, model
    ).total
    rotations = np.abs(result.state.orientations).max()
    print(
        f"4x4 {label:11s}: converged={result.converged} in {result.steps} steps, "
        f"energy {energy:.4f}, max |rotation| {rotations:.3f} rad"
    )
    svg = sl.render_svg(lattice, result.state.positions, result.state.orientations)
    (OUT / f"sheet_{label}.svg").write_text(svg)

# --- 8-node column between grips: the buckling bifurcation -----------------
column = sl.build_lattice(sl.LatticeSpec(rows=8, cols=1, shape=shape))
zero = lambda t: 0.0
top, bottom = np.array([7]), np.array([0])
grips = [
    sl.Prescription(bottom, "x1", zero),
    sl.Prescription(bottom, "x2", zero),
    sl.Prescription(bottom, "theta", zero),
    sl.Prescription(top, "x1", zero),
    sl.Prescription(top, "theta", zero),
]

print("\ncolumn under increasing compression (grips clamp end rotations):")
for strain in (0.02, 0.06, 0.10):
    protocol = sl.LoadProtocol(
        column.n_nodes,
        grips + [sl.Prescription(top, "x2", lambda t, s=strain: -s * 7.0)],
    )
    result = sl.quasi_static_relax(
        column, model, protocol, damping=sl.Damping(2.0, 0.2),
        perturb_orientations=1e-2, seed=3, max_steps=400_000,
    )
    feats = sl.edge_feature_table(column, result.state.positions, result.state.orientations)
    max_rot = np.abs(feats[:, :2]).max()
    buckled = "buckled" if max_rot > 0.05 else "straight"
    print(f"  strain {strain:.2f}: max spring rotation {max_rot:.3f} rad -> {buckled}")
    if strain == 0.10:
        svg = sl.render_svg(column, result.state.positions, result.state.orientations)
        (OUT / "column_buckled.svg").write_text(svg)

print(f"\nwrote SVG snapshots to {OUT}")
