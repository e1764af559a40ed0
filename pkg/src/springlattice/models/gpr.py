"""Gaussian process regression over the edge feature triple.

Zero-mean GP with a squared exponential kernel and additive observation
noise.  Fitting stores the Cholesky factor of the regularized kernel
matrix and the dual weights; hyperparameters are selected by maximizing
the log marginal likelihood with L-BFGS-B in log-parameter space from
several random restarts.

The elongation component of the features is divided by the unit-cell
length before it reaches the kernel, so a single isotropic length scale
acts on three order-one inputs.  Energies are regressed raw (unscaled).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular
from scipy.optimize import minimize

from .base import EdgeEnergyModel

# Rows per block when evaluating the kernel against large query batches;
# keeps the working set cache-sized (see bench demo).
QUERY_BLOCK = 4096

RESTART_RANGES = {
    "sigma2": (1e-2, 1e1),
    "length_scale": (1e-1, 1e1),
    "noise2": (1e-6, 1e-2),
}

_LOG_BOUNDS = [(np.log(1e-6), np.log(1e4)), (np.log(1e-3), np.log(1e3)), (np.log(1e-12), np.log(1e1))]


class ConditioningError(ValueError):
    """Kernel matrix could not be factorized for the given hyperparameters."""


@dataclass(frozen=True)
class GprHyperparams:
    """Output variance, isotropic length scale, and noise variance."""

    sigma2: float
    length_scale: float
    noise2: float

    def __post_init__(self):
        if not (self.sigma2 > 0.0 and self.length_scale > 0.0 and self.noise2 >= 0.0):
            raise ValueError(f"hyperparameters must be positive (noise2 >= 0): {self}")

    def as_log_array(self) -> np.ndarray:
        # noise2 == 0 is valid for fitting but not representable in log space
        return np.log([self.sigma2, self.length_scale, max(self.noise2, 1e-300)])

    @classmethod
    def from_log_array(cls, x) -> "GprHyperparams":
        return cls(*np.exp(np.asarray(x, dtype=float)))


def se_kernel(z, zp, hp: GprHyperparams):
    """Squared exponential kernel sigma^2 * exp(-|z - z'|^2 / (2 l^2)).

    Accepts single vectors or batches; broadcasts over leading axes.
    """
    diff = np.asarray(z, dtype=float) - np.asarray(zp, dtype=float)
    sq = np.sum(diff * diff, axis=-1)
    return hp.sigma2 * np.exp(-0.5 * sq / hp.length_scale**2)


def _scaled(features: np.ndarray, l0: float) -> np.ndarray:
    z = np.array(features, dtype=float)
    z[:, 2] /= l0
    return z


def _sq_dists(za: np.ndarray, zb: np.ndarray) -> np.ndarray:
    g = za @ zb.T
    out = (za * za).sum(axis=1)[:, None] + (zb * zb).sum(axis=1)[None, :] - 2.0 * g
    return np.maximum(out, 0.0)


def _factorize(z: np.ndarray, hp: GprHyperparams) -> tuple[np.ndarray, np.ndarray]:
    """Kernel matrix with noise on the diagonal and its lower Cholesky factor."""
    sq = _sq_dists(z, z)
    k = hp.sigma2 * np.exp(-0.5 * sq / hp.length_scale**2)
    k[np.diag_indices_from(k)] += hp.noise2
    try:
        lower = cholesky(k, lower=True)
    except np.linalg.LinAlgError as exc:
        raise ConditioningError(
            f"kernel matrix is not positive definite for {hp}; "
            "increase noise2 or remove duplicate inputs"
        ) from exc
    return k, lower


def log_marginal_likelihood(features, energies, hp: GprHyperparams, l0: float = 1.0, with_gradient: bool = False):
    """Log marginal likelihood of the training data, optionally with its
    gradient with respect to (log sigma2, log length_scale, log noise2).
    """
    z = _scaled(np.atleast_2d(features), l0)
    y = np.asarray(energies, dtype=float)
    n = len(y)
    _, lower = _factorize(z, hp)
    alpha = cho_solve((lower, True), y)
    lml = -0.5 * y @ alpha - np.log(np.diag(lower)).sum() - 0.5 * n * np.log(2.0 * np.pi)
    if not with_gradient:
        return float(lml)

    sq = _sq_dists(z, z)
    k_se = hp.sigma2 * np.exp(-0.5 * sq / hp.length_scale**2)
    # d/dtheta log p = 0.5 tr((alpha alpha^T - K^-1) dK/dtheta)
    tmp = np.outer(alpha, alpha) - cho_solve((lower, True), np.eye(n))
    grad = np.array(
        [
            0.5 * np.sum(tmp * k_se),
            0.5 * np.sum(tmp * (k_se * sq / hp.length_scale**2)),
            0.5 * np.trace(tmp) * hp.noise2,
        ]
    )
    return float(lml), grad


def optimize_hyperparams(
    features,
    energies,
    init: GprHyperparams | None = None,
    restarts: int = 8,
    seed: int = 0,
    l0: float = 1.0,
) -> GprHyperparams:
    """Maximize the log marginal likelihood over the three hyperparameters.

    Runs L-BFGS-B in log space from ``init`` plus ``restarts`` random
    starting points drawn log-uniformly from RESTART_RANGES, and returns
    the best optimum found.  The result never has a lower log marginal
    likelihood than ``init`` itself.
    """
    init = init or GprHyperparams(1.0, 1.0, 1e-4)
    z = np.atleast_2d(np.asarray(features, dtype=float))
    y = np.asarray(energies, dtype=float)

    def objective(x):
        try:
            lml, grad = log_marginal_likelihood(z, y, GprHyperparams.from_log_array(x), l0, with_gradient=True)
        except ConditioningError:
            return 1e25, np.zeros(3)
        return -lml, -grad

    rng = np.random.default_rng(seed)
    starts = [init.as_log_array()]
    lo = np.log([RESTART_RANGES["sigma2"][0], RESTART_RANGES["length_scale"][0], RESTART_RANGES["noise2"][0]])
    hi = np.log([RESTART_RANGES["sigma2"][1], RESTART_RANGES["length_scale"][1], RESTART_RANGES["noise2"][1]])
    for _ in range(restarts):
        starts.append(rng.uniform(lo, hi))

    candidates = []
    try:
        candidates.append((init, log_marginal_likelihood(z, y, init, l0)))
    except ConditioningError:
        pass
    for x0 in starts:
        res = minimize(objective, x0, jac=True, method="L-BFGS-B", bounds=_LOG_BOUNDS)
        value = -res.fun
        if np.isfinite(value):
            candidates.append((GprHyperparams.from_log_array(res.x), float(value)))
    if not candidates:
        raise ConditioningError("no hyperparameter start produced a positive-definite kernel matrix")
    return max(candidates, key=lambda c: c[1])[0]


@dataclass(frozen=True)
class GprModel(EdgeEnergyModel):
    """Fitted GP posterior mean/variance acting as an edge-energy model.

    ``train_inputs`` are stored in the scaled feature space (third
    component already divided by ``l0``).
    """

    train_inputs: np.ndarray
    train_targets: np.ndarray
    alpha: np.ndarray
    chol_lower: np.ndarray
    hyperparams: GprHyperparams
    l0: float = 1.0
    y_bounds: tuple[float, float] | None = None
    reference_offset: float = 0.0

    def __post_init__(self):
        for name in ("train_inputs", "train_targets", "alpha", "chol_lower"):
            getattr(self, name).flags.writeable = False

    @property
    def n_train(self) -> int:
        return len(self.alpha)

    def _kernel_to_train(self, zq: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
        """k(z_query, Z_train) for an already-scaled query block, shape (m, n)."""
        hp = self.hyperparams
        if out is None:
            out = np.empty((len(zq), self.n_train))
        g = out
        np.dot(zq, self.train_inputs.T, out=g)
        g *= -2.0
        g += np.einsum("ij,ij->i", zq, zq)[:, None]
        g += np.einsum("ij,ij->i", self.train_inputs, self.train_inputs)[None, :]
        g *= -0.5 / hp.length_scale**2
        np.exp(g, out=g)
        g *= hp.sigma2
        return g

    def _blocks(self, z: np.ndarray):
        zs = _scaled(z, self.l0)
        for i in range(0, len(zs), QUERY_BLOCK):
            yield i, zs[i : i + QUERY_BLOCK]

    def _mean(self, k: np.ndarray) -> np.ndarray:
        # einsum keeps each row's reduction order independent of the batch
        # shape (BLAS gemv/gemm dispatch does not), so a calibrated model is
        # exactly zero at the reference triple in batches of any size
        return np.einsum("ij,j->i", k, self.alpha)

    def _evaluate(self, z: np.ndarray, want_energy: bool, want_gradient: bool):
        """Blocked posterior evaluation with one reused kernel buffer.

        The buffer matters: the kernel block against 800 training points is
        tens of megabytes, and reallocating it per block costs more than the
        arithmetic at large lattice sizes.
        """
        n = len(z)
        energy = np.empty(n) if want_energy else None
        grad = np.empty((n, 3)) if want_gradient else None
        scratch = np.empty((min(QUERY_BLOCK, max(n, 1)), self.n_train))
        inv_l2 = 1.0 / self.hyperparams.length_scale**2
        for i, zq in self._blocks(z):
            k = self._kernel_to_train(zq, out=scratch[: len(zq)])
            if want_energy:
                energy[i : i + len(zq)] = self._mean(k)
            if want_gradient:
                k *= self.alpha[None, :]
                block = k @ self.train_inputs
                block -= k.sum(axis=1)[:, None] * zq
                block *= inv_l2
                block[:, 2] /= self.l0
                grad[i : i + len(zq)] = block
        return energy, grad

    def _energy_impl(self, z: np.ndarray) -> np.ndarray:
        return self._evaluate(z, True, False)[0]

    def _gradient_impl(self, z: np.ndarray) -> np.ndarray:
        return self._evaluate(z, False, True)[1]

    def _energy_and_gradient_impl(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return self._evaluate(z, True, True)

    def predict(self, z, clamp_variance: bool = True):
        """Posterior mean (reference-shifted) and variance at query triples.

        Scalars in, scalars out; batches in, arrays out.  The variance is
        clamped at zero unless ``clamp_variance`` is false.
        """
        arr = np.asarray(z, dtype=float)
        single = arr.ndim == 1
        mean = self.energy(arr)
        var = np.empty(1 if single else len(arr))
        for i, zq in self._blocks(arr.reshape(-1, 3)):
            k = self._kernel_to_train(zq)
            v = solve_triangular(self.chol_lower, k.T, lower=True)
            var[i : i + len(zq)] = self.hyperparams.sigma2 - np.einsum("ij,ij->j", v, v)
        if clamp_variance:
            var = np.maximum(var, 0.0)
        if single:
            return mean, float(var[0])
        return mean, var


def fit_gpr(
    features,
    energies,
    hp: GprHyperparams,
    l0: float = 1.0,
    y_bounds: tuple[float, float] | None = None,
) -> GprModel:
    """Fit the GP posterior for fixed hyperparameters.

    The returned model is reference-calibrated: its energy at (0, 0, 0)
    is exactly zero.  Raises ConditioningError when the kernel matrix
    cannot be factorized (for example duplicate inputs with zero noise).
    """
    z = _scaled(np.atleast_2d(np.asarray(features, dtype=float)), l0)
    y = np.array(energies, dtype=float)
    if len(z) != len(y):
        raise ValueError(f"{len(z)} inputs vs {len(y)} targets")
    _, lower = _factorize(z, hp)
    alpha = cho_solve((lower, True), y)
    model = GprModel(
        train_inputs=z,
        train_targets=y,
        alpha=alpha,
        chol_lower=lower,
        hyperparams=hp,
        l0=l0,
        y_bounds=y_bounds,
    )
    return model.calibrated()


def train_gpr(
    features,
    energies,
    init: GprHyperparams | None = None,
    restarts: int = 8,
    seed: int = 0,
    l0: float = 1.0,
    y_bounds: tuple[float, float] | None = None,
) -> GprModel:
    """Optimize hyperparameters on the training data, then fit."""
    hp = optimize_hyperparams(features, energies, init=init, restarts=restarts, seed=seed, l0=l0)
    return fit_gpr(features, energies, hp, l0=l0, y_bounds=y_bounds)
