"""Pore-shape geometry and lattice construction.

Walks the five reference pore shapes (a circle progressively squashed
toward a four-lobed rounded square), checks their geometric validity,
and builds the cross-spring lattice that stands in for the porous sheet.
Outputs: a radius plot and an SVG of the reference lattice.
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import springlattice as sl

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

print("pore shapes: xi bends the circular pore, phi0 sets its area fraction\n")

fig, ax = plt.subplots(subplot_kw={"projection": "polar"}, figsize=(5, 5))
alpha = np.linspace(0, 2 * np.pi, 721)
for label, xi in zip("ABCDE", (0.0, -0.05, -0.10, -0.15, -0.20)):
    shape = sl.PoreShape(xi=xi, phi0=0.5, l0=1.0)
    report = sl.validate_pore_shape(shape)
    r0 = sl.base_radius(shape)
    print(f"shape {label}: xi={xi:+.2f}  r0={r0:.4f}  valid={report.ok}")
    ax.plot(alpha, sl.pore_radius(shape, alpha), label=f"{label} (xi={xi:+.2f})")
ax.set_title("pore contours at porosity 0.5")
ax.legend(loc="lower left", fontsize=8)
fig.savefig(OUT / "pore_contours.png", dpi=120)
print(f"\nwrote {OUT / 'pore_contours.png'}")

# a shape that leaks out of its cell fails containment, reported not raised
bad = sl.validate_pore_shape(sl.PoreShape(xi=0.0, phi0=0.9, l0=1.0))
worst = {c.name: c for c in bad.checks}["containment"]
print(f"\nphi0=0.9 fails containment: margin {worst.margin:.3f} at alpha={worst.worst_alpha:.2f}")

# the discrete stand-in: one rigid cross per cell, springs to 4 neighbours
lattice = sl.build_lattice(
    sl.LatticeSpec(rows=8, cols=8, shape=sl.PoreShape(0.0, 0.5, 1.0), density=1.0)
)
print(f"\n8x8 lattice: {lattice.n_nodes} crosses, {lattice.n_edges} springs")
print(f"per-cross mass {lattice.masses[0]:.3f}, inertia {lattice.inertias[0]:.4f}")

(OUT / "lattice_8x8.svg").write_text(sl.render_svg(lattice))
print(f"wrote {OUT / 'lattice_8x8.svg'}")

# defects are plain edge removals; here one vertical spring per 4x4 block
defected = sl.apply_defects(lattice, sl.PeriodicDefects(4, 4, ((1, 1, "v"),)))
print(f"defected copy keeps {defected.n_edges} of {lattice.n_edges} springs")
(OUT / "lattice_8x8_defected.svg").write_text(sl.render_svg(defected))
