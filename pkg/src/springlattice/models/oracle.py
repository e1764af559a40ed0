"""Closed-form ground-truth edge energies.

The analytic family combines quadratic stretch and rotation terms, a
stretch-rotation coupling, and a quartic term that develops two wells in
the counter-rotation coordinate once the spring is compressed past the
reference length.  It serves as an exactly differentiable stand-in for
measured unit-cell data: datasets labelled with it have a known energy
landscape, so regression and simulation results can be checked against
closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import EdgeEnergyModel


@dataclass(frozen=True)
class AnalyticOracle(EdgeEnergyModel):
    """Polynomial edge energy with optional compression-triggered bistability.

    With s = theta_a~ + theta_b~, t = theta_a~ - theta_b~ and
    m = max(-d, 0):

        E = k_d/2 d^2 + k_s/2 s^2 + k_t/2 t^2 + c_couple d s
            + q4 (t^2 - d_star m)^2

    The quartic term is flat for stretched springs (m = 0) and carves two
    wells at t = +/- sqrt(d_star m - k_t / (4 q4)) under sufficient
    compression.  ``d_star`` has units of 1/length.

    A mirror-symmetric building block has energy even under flipping
    both rotations, which requires c_couple = 0; the coupling is kept
    for asymmetric cells.
    """

    k_d: float = 1.0
    k_s: float = 0.5
    k_t: float = 0.3
    c_couple: float = 0.0
    q4: float = 0.0
    d_star: float = 0.0
    reference_offset: float = 0.0

    @classmethod
    def quadratic(cls, k_d=1.0, k_s=0.5, k_t=0.3, c_couple=0.0) -> "AnalyticOracle":
        """Convex quadratic landscape: one minimum at the reference triple."""
        return cls(k_d=k_d, k_s=k_s, k_t=k_t, c_couple=c_couple)

    @classmethod
    def bistable(cls, k_d=1.0, k_s=0.5, k_t=0.3, c_couple=0.0, q4=2.0, d_star=5.0) -> "AnalyticOracle":
        """Landscape with two wells under compression, one under tension."""
        return cls(k_d=k_d, k_s=k_s, k_t=k_t, c_couple=c_couple, q4=q4, d_star=d_star)

    def _energy_impl(self, z: np.ndarray) -> np.ndarray:
        ta, tb, d = z[:, 0], z[:, 1], z[:, 2]
        s = ta + tb
        t = ta - tb
        well = t * t - self.d_star * np.maximum(-d, 0.0)
        return (
            0.5 * self.k_d * d * d
            + 0.5 * self.k_s * s * s
            + 0.5 * self.k_t * t * t
            + self.c_couple * d * s
            + self.q4 * well * well
        )

    def _gradient_impl(self, z: np.ndarray) -> np.ndarray:
        ta, tb, d = z[:, 0], z[:, 1], z[:, 2]
        s = ta + tb
        t = ta - tb
        compressed = d < 0.0
        well = t * t - self.d_star * np.where(compressed, -d, 0.0)
        common = self.k_s * s + self.c_couple * d
        anti = self.k_t * t + 4.0 * self.q4 * well * t
        grad = np.empty_like(z)
        grad[:, 0] = common + anti
        grad[:, 1] = common - anti
        # max(-d, 0) has slope -1 for d < 0; the d = 0 kink takes the
        # zero-slope side, matching the rectifier convention elsewhere.
        grad[:, 2] = self.k_d * d + self.c_couple * s + 2.0 * self.q4 * well * self.d_star * compressed
        return grad
