"""SVG snapshots of lattice configurations.

Each cross is drawn as two perpendicular segments centered on its node
and rotated with it; surviving edges are straight lines between node
centers.  Output is self-contained XML with no external references.
"""

from __future__ import annotations

from dataclasses import dataclass
from xml.etree import ElementTree

import numpy as np

from .geometry import Lattice

SVG_NS = "http://www.w3.org/2000/svg"


@dataclass(frozen=True)
class RenderOptions:
    arm_fraction: float = 0.4  # cross arm length in units of l0
    margin_fraction: float = 0.05  # viewport padding around the bounding box
    stroke_fraction: float = 0.04  # line width in units of l0
    edge_color: str = "#9aa5b1"
    cross_color: str = "#1f2933"
    scale: float = 100.0  # SVG user units per length unit


def render_svg(
    lattice: Lattice,
    positions=None,
    orientations=None,
    options: RenderOptions = RenderOptions(),
) -> str:
    """Render a configuration (default: the reference state) as an SVG string."""
    x = np.asarray(positions if positions is not None else lattice.positions, dtype=float)
    theta = np.asarray(orientations if orientations is not None else lattice.orientations, dtype=float)
    if x.shape != (lattice.n_nodes, 2) or theta.shape != (lattice.n_nodes,):
        raise ValueError("snapshot arrays do not match the lattice size")

    arm = options.arm_fraction * lattice.l0
    # cross arm endpoints: two segments at theta and theta + pi/2
    c, s = np.cos(theta), np.sin(theta)
    along = np.stack([c, s], axis=1) * arm
    across = np.stack([-s, c], axis=1) * arm

    pts = [x - along, x + along, x - across, x + across, x]
    all_pts = np.concatenate(pts, axis=0)
    lo = all_pts.min(axis=0)
    hi = all_pts.max(axis=0)
    span = np.maximum(hi - lo, 1e-9)
    pad = options.margin_fraction * span.max()
    lo -= pad
    hi += pad

    scale = options.scale

    def to_svg(p):
        # flip the vertical axis: SVG y grows downward
        return (p[0] - lo[0]) * scale, (hi[1] - p[1]) * scale

    width = (hi[0] - lo[0]) * scale
    height = (hi[1] - lo[1]) * scale
    stroke = options.stroke_fraction * lattice.l0 * scale

    root = ElementTree.Element(
        "svg",
        {
            "xmlns": SVG_NS,
            "width": f"{width:.2f}",
            "height": f"{height:.2f}",
            "viewBox": f"0 0 {width:.2f} {height:.2f}",
        },
    )

    def line(parent, p0, p1, color, cls):
        x0, y0 = to_svg(p0)
        x1, y1 = to_svg(p1)
        ElementTree.SubElement(
            parent,
            "line",
            {
                "class": cls,
                "x1": f"{x0:.3f}",
                "y1": f"{y0:.3f}",
                "x2": f"{x1:.3f}",
                "y2": f"{y1:.3f}",
                "stroke": color,
                "stroke-width": f"{stroke:.3f}",
                "stroke-linecap": "round",
            },
        )

    edges_group = ElementTree.SubElement(root, "g", {"id": "edges"})
    for a, b in lattice.edges:
        line(edges_group, x[a], x[b], options.edge_color, "edge")

    crosses_group = ElementTree.SubElement(root, "g", {"id": "crosses"})
    for i in range(lattice.n_nodes):
        line(crosses_group, x[i] - along[i], x[i] + along[i], options.cross_color, "cross-arm")
        line(crosses_group, x[i] - across[i], x[i] + across[i], options.cross_color, "cross-arm")

    return ElementTree.tostring(root, encoding="unicode", xml_declaration=True) + "\n"
