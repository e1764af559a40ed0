"""Rigid-motion-invariant edge features and their exact Jacobian.

A spring joining crosses a and b is described by the triple
(theta_a~, theta_b~, d): the two endpoint rotations measured relative to
the spring axis, and the spring elongation.  The triple is invariant
under any in-plane rigid motion applied to the spatial configuration, so
an energy expressed over it inherits that invariance.

All angle-valued quantities are wrapped to (-pi, pi].  Batched variants
operate on arrays with one row per edge and are what the force-assembly
code calls; the scalar API wraps them for single-edge work.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DegenerateEdgeError(ValueError):
    """Raised when the two endpoints of an edge coincide."""


@dataclass(frozen=True)
class NodeState:
    """Spatial and reference pose of one cross."""

    x: np.ndarray  # (2,) spatial position
    theta: float  # spatial orientation, radians
    x_ref: np.ndarray  # (2,) reference position
    theta_ref: float = 0.0  # reference orientation, radians


@dataclass(frozen=True)
class EdgeFeatures:
    """Invariant feature triple of one edge."""

    theta_a: float
    theta_b: float
    d: float

    def __array__(self, dtype=None, copy=None):
        return np.array([self.theta_a, self.theta_b, self.d], dtype=dtype or float)


def wrap_angle(angle):
    """Wrap angle(s) to the interval (-pi, pi]."""
    out = np.pi - np.mod(np.pi - np.asarray(angle), 2.0 * np.pi)
    # rounding inside mod may graze the open end of the interval
    return np.where(out == -np.pi, np.pi, out)


def edge_features_arrays(
    xa: np.ndarray,
    theta_a: np.ndarray,
    xb: np.ndarray,
    theta_b: np.ndarray,
    xa_ref: np.ndarray,
    theta_a_ref: np.ndarray,
    xb_ref: np.ndarray,
    theta_b_ref: np.ndarray,
) -> np.ndarray:
    """Feature triples for a batch of edges; returns shape (n, 3).

    Positions are (n, 2) arrays, orientations (n,).  The relative spring
    rotation (beta - beta_ref) is wrapped before it is subtracted from
    the endpoint rotations, and the results are wrapped again.
    """
    u = xb - xa
    r = np.hypot(u[..., 0], u[..., 1])
    if np.any(r == 0.0):
        bad = int(np.argmax(r == 0.0))
        raise DegenerateEdgeError(f"coincident endpoints (first at edge row {bad})")
    u_ref = xb_ref - xa_ref
    r_ref = np.hypot(u_ref[..., 0], u_ref[..., 1])
    if np.any(r_ref == 0.0):
        bad = int(np.argmax(r_ref == 0.0))
        raise DegenerateEdgeError(f"coincident reference endpoints (first at edge row {bad})")

    # wrapped spring rotation beta - beta_ref, computed as the angle from
    # the reference edge vector to the spatial one; negating both vectors
    # (an endpoint swap) leaves cross and dot bitwise unchanged
    cross = u_ref[..., 0] * u[..., 1] - u_ref[..., 1] * u[..., 0]
    dot = u_ref[..., 0] * u[..., 0] + u_ref[..., 1] * u[..., 1]
    rel = np.arctan2(cross, dot)
    ta = wrap_angle((theta_a - theta_a_ref) - rel)
    tb = wrap_angle((theta_b - theta_b_ref) - rel)
    return np.stack([ta, tb, r - r_ref], axis=-1)


def edge_feature_jacobian_arrays(
    xa: np.ndarray,
    xb: np.ndarray,
) -> np.ndarray:
    """Jacobian d(theta_a~, theta_b~, d)/d(xa1, xa2, theta_a, xb1, xb2, theta_b).

    Returns shape (n, 3, 6).  Only the spatial positions enter: the
    elongation row is the unit vector along the edge, and the rotation
    rows combine the +/-1 orientation partials with the gradient of the
    spring's polar angle, grad beta = perp(u) / |u|^2 at the b end.
    """
    u = xb - xa
    r = np.hypot(u[..., 0], u[..., 1])  # hypot: no overflow for huge components
    if np.any(r == 0.0):
        bad = int(np.argmax(r == 0.0))
        raise DegenerateEdgeError(f"coincident endpoints (first at edge row {bad})")

    n = u.shape[0] if u.ndim == 2 else 1
    u = u.reshape(n, 2)
    r = np.ravel(r)
    # r^2 may overflow for absurdly separated nodes; 1/r^2 then underflows
    # to the honest limit of the angle gradient, zero
    with np.errstate(over="ignore"):
        r2 = r * r
        dbeta_b = np.stack([-u[:, 1] / r2, u[:, 0] / r2], axis=1)  # dbeta/dxb
    unit = u / r[:, None]

    jac = np.zeros((n, 3, 6))
    # rows 0, 1: theta_a~, theta_b~ = (theta - theta_ref) - (beta - beta_ref)
    jac[:, 0, 0:2] = dbeta_b
    jac[:, 0, 3:5] = -dbeta_b
    jac[:, 0, 2] = 1.0
    jac[:, 1, 0:2] = dbeta_b
    jac[:, 1, 3:5] = -dbeta_b
    jac[:, 1, 5] = 1.0
    # row 2: d = |xb - xa| - |xb_ref - xa_ref|
    jac[:, 2, 0:2] = -unit
    jac[:, 2, 3:5] = unit
    return jac


def edge_features(a: NodeState, b: NodeState) -> EdgeFeatures:
    """Invariant feature triple of the edge from node a to node b."""
    out = edge_features_arrays(
        np.asarray(a.x, float),
        np.asarray(a.theta, float),
        np.asarray(b.x, float),
        np.asarray(b.theta, float),
        np.asarray(a.x_ref, float),
        np.asarray(a.theta_ref, float),
        np.asarray(b.x_ref, float),
        np.asarray(b.theta_ref, float),
    )
    return EdgeFeatures(float(out[0]), float(out[1]), float(out[2]))


def edge_feature_jacobian(a: NodeState, b: NodeState) -> np.ndarray:
    """3x6 Jacobian of the feature triple w.r.t. (xa, theta_a, xb, theta_b)."""
    return edge_feature_jacobian_arrays(
        np.asarray(a.x, float).reshape(1, 2),
        np.asarray(b.x, float).reshape(1, 2),
    )[0]


def rotation_matrix(gamma: float) -> np.ndarray:
    """In-plane rotation by angle gamma."""
    c, s = np.cos(gamma), np.sin(gamma)
    return np.array([[c, -s], [s, c]])
