"""Edge-energy model interface.

An edge-energy model maps the invariant feature triple
(theta_a~, theta_b~, d) to a scalar spring energy and exposes the exact
gradient of that energy with respect to the triple.  Implementations
accept a single triple (shape (3,) or an EdgeFeatures) or a batch
(n, 3) and return matching scalar/array shapes.

``reference_offset`` is subtracted from the raw energy so that a
calibrated model is exactly zero at the reference triple (0, 0, 0).
"""

from __future__ import annotations

import abc
import dataclasses

import numpy as np

ORIGIN = np.zeros((1, 3))


def as_batch(z) -> tuple[np.ndarray, bool]:
    """Coerce a feature triple or a batch of triples to shape (n, 3)."""
    arr = np.asarray(z, dtype=float)
    if arr.ndim == 1:
        if arr.shape != (3,):
            raise ValueError(f"feature triple must have 3 entries, got {arr.shape}")
        return arr.reshape(1, 3), True
    if arr.ndim == 2 and arr.shape[1] == 3:
        return arr, False
    raise ValueError(f"features must have shape (3,) or (n, 3), got {arr.shape}")


class EdgeEnergyModel(abc.ABC):
    """Scalar elastic energy of one spring over the invariant feature triple."""

    reference_offset: float = 0.0

    @abc.abstractmethod
    def _energy_impl(self, z: np.ndarray) -> np.ndarray:
        """Raw (un-offset) energies for a (n, 3) batch."""

    @abc.abstractmethod
    def _gradient_impl(self, z: np.ndarray) -> np.ndarray:
        """Exact gradients, shape (n, 3), for a (n, 3) batch."""

    def _energy_and_gradient_impl(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return self._energy_impl(z), self._gradient_impl(z)

    def energy(self, z):
        batch, single = as_batch(z)
        out = self._energy_impl(batch) - self.reference_offset
        return float(out[0]) if single else out

    def gradient(self, z):
        batch, single = as_batch(z)
        out = self._gradient_impl(batch)
        return out[0] if single else out

    def energy_and_gradient(self, z):
        """Energy and gradient together; subclasses may share work."""
        batch, single = as_batch(z)
        e, g = self._energy_and_gradient_impl(batch)
        e = e - self.reference_offset
        if single:
            return float(e[0]), g[0]
        return e, g

    def calibrated(self) -> "EdgeEnergyModel":
        """Copy of the model whose energy at (0, 0, 0) is exactly zero."""
        offset = float(self._energy_impl(ORIGIN)[0])
        return dataclasses.replace(self, reference_offset=offset)


def finite_difference_gradient(model: EdgeEnergyModel, z, step=1e-6) -> np.ndarray:
    """Central-difference gradient of a model's energy; shape matches gradient().

    ``step`` may be a scalar or one step per feature component (useful when
    the elongation carries length units).
    """
    batch, single = as_batch(z)
    step = np.broadcast_to(np.asarray(step, dtype=float), (3,))
    out = np.empty_like(batch)
    for j in range(3):
        h = np.zeros(3)
        h[j] = step[j]
        out[:, j] = (model.energy(batch + h) - model.energy(batch - h)) / (2.0 * step[j])
    return out[0] if single else out


def hessian_at_origin(model: EdgeEnergyModel, step=1e-5) -> np.ndarray:
    """Symmetrized central-difference Hessian of the energy at (0, 0, 0)."""
    step = np.broadcast_to(np.asarray(step, dtype=float), (3,))
    hess = np.empty((3, 3))
    for j in range(3):
        h = np.zeros((1, 3))
        h[0, j] = step[j]
        hess[:, j] = (model.gradient(h)[0] - model.gradient(-h)[0]) / (2.0 * step[j])
    return 0.5 * (hess + hess.T)
