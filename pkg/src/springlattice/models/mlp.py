"""Fully-connected rectifier network baseline for the edge energy.

Plain numpy implementation: forward pass, reverse-mode input gradient,
and mini-batch Adam training on the mean squared error.  Training is
deterministic for a fixed seed.  The elongation input is divided by the
unit-cell length, mirroring the GPR feature scaling, so the two
surrogates see identical inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .base import EdgeEnergyModel
from ..data import smse, training_bounds


class TrainingDivergedError(RuntimeError):
    """Training loss became non-finite."""


@dataclass(frozen=True)
class MlpArchitecture:
    """Hidden-layer count/width plus optimizer settings."""

    hidden_layers: int = 2
    width: int = 32
    learning_rate: float = 4e-4
    batch_size: int = 32
    epochs: int = 2000
    patience: int = 200


# The three reference architectures compared against GPR, small to large.
# The large net's learning rate is aggressive on purpose; it is part of
# the comparison, not a recommended setting.
STANDARD_ARCHITECTURES = (
    MlpArchitecture(hidden_layers=2, width=32, learning_rate=4e-4, batch_size=32),
    MlpArchitecture(hidden_layers=4, width=64, learning_rate=2e-4, batch_size=32),
    MlpArchitecture(hidden_layers=8, width=128, learning_rate=1e-1, batch_size=32),
)


@dataclass(frozen=True)
class MlpModel(EdgeEnergyModel):
    """Stacked affine + rectifier layers mapping the feature triple to energy."""

    weights: tuple[np.ndarray, ...]  # (out, in) per layer
    biases: tuple[np.ndarray, ...]
    l0: float = 1.0
    y_bounds: tuple[float, float] | None = None
    reference_offset: float = 0.0

    def __post_init__(self):
        widths = [3] + [w.shape[0] for w in self.weights]
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape[1] != widths[i] or b.shape != (w.shape[0],):
                raise ValueError(f"layer {i} shape mismatch: {w.shape} after width {widths[i]}")
        if widths[-1] != 1:
            raise ValueError(f"output width must be 1, got {widths[-1]}")
        for w, b in zip(self.weights, self.biases):
            w.flags.writeable = False
            b.flags.writeable = False

    def _scaled(self, z: np.ndarray) -> np.ndarray:
        zs = np.array(z)
        zs[:, 2] /= self.l0
        return zs

    def _forward(self, z: np.ndarray):
        """Activations and pre-activations of every hidden layer."""
        a = self._scaled(z)
        pres = []
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            pre = a @ w.T + b
            pres.append(pre)
            a = np.maximum(pre, 0.0)
        out = a @ self.weights[-1].T + self.biases[-1]
        return out[:, 0], pres

    def _energy_impl(self, z: np.ndarray) -> np.ndarray:
        return self._forward(z)[0]

    def _gradient_impl(self, z: np.ndarray) -> np.ndarray:
        _, pres = self._forward(z)
        # Reverse accumulation; the rectifier kink takes the zero-slope side.
        grad = np.broadcast_to(self.weights[-1], (len(z), self.weights[-1].shape[1])).copy()
        for w, pre in zip(reversed(self.weights[:-1]), reversed(pres)):
            grad *= pre > 0.0
            grad = grad @ w
        grad[:, 2] /= self.l0
        return grad


@dataclass
class TrainingHistory:
    """Per-epoch SMSE curves and the epoch the returned weights come from."""

    train_smse: list[float] = field(default_factory=list)
    val_smse: list[float] = field(default_factory=list)
    best_epoch: int = -1
    epochs_run: int = 0


def init_mlp(arch: MlpArchitecture, seed: int, l0: float = 1.0) -> MlpModel:
    """He-initialized network with zero biases."""
    rng = np.random.default_rng(seed)
    widths = [3] + [arch.width] * arch.hidden_layers + [1]
    weights, biases = [], []
    for fan_in, fan_out in zip(widths[:-1], widths[1:]):
        weights.append(rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MlpModel(weights=tuple(weights), biases=tuple(biases), l0=l0)


def train_mlp(
    features,
    energies,
    arch: MlpArchitecture = MlpArchitecture(),
    seed: int = 0,
    val_features=None,
    val_energies=None,
    l0: float = 1.0,
) -> tuple[MlpModel, TrainingHistory]:
    """Mini-batch Adam on the mean squared error.

    Records train (and, when given, validation) SMSE per epoch with
    scaling bounds taken from the training targets.  Keeps the weights
    of the best epoch by validation SMSE (train SMSE when no validation
    set is supplied) and stops early after ``arch.patience`` epochs
    without improvement.  Raises TrainingDivergedError if the loss
    leaves the reals.
    """
    z = np.asarray(features, dtype=float)
    y = np.asarray(energies, dtype=float)
    if len(z) == 0:
        raise ValueError("empty training set")
    bounds = training_bounds(y)
    has_val = val_features is not None
    if has_val:
        zvs = np.asarray(val_features, dtype=float).copy()
        zvs[:, 2] /= l0
        yv = np.asarray(val_energies, dtype=float)

    rng = np.random.default_rng(seed)
    model = init_mlp(arch, seed=rng.integers(2**63), l0=l0)
    weights = [w.copy() for w in model.weights]
    biases = [b.copy() for b in model.biases]
    zs = z.copy()
    zs[:, 2] /= l0

    beta1, beta2, eps = 0.9, 0.999, 1e-8
    m_w = [np.zeros_like(w) for w in weights]
    v_w = [np.zeros_like(w) for w in weights]
    m_b = [np.zeros_like(b) for b in biases]
    v_b = [np.zeros_like(b) for b in biases]
    t_adam = 0

    def evaluate(batch_scaled, targets):
        a = batch_scaled
        for w, b in zip(weights[:-1], biases[:-1]):
            a = np.maximum(a @ w.T + b, 0.0)
        return (a @ weights[-1].T + biases[-1])[:, 0]

    history = TrainingHistory()
    best_key = np.inf
    best_state = ([w.copy() for w in weights], [b.copy() for b in biases])

    n = len(zs)
    for epoch in range(arch.epochs):
        order = rng.permutation(n)
        for start in range(0, n, arch.batch_size):
            idx = order[start : start + arch.batch_size]
            xb, yb = zs[idx], y[idx]

            acts = [xb]
            pres = []
            a = xb
            for w, b in zip(weights[:-1], biases[:-1]):
                pre = a @ w.T + b
                pres.append(pre)
                a = np.maximum(pre, 0.0)
                acts.append(a)
            out = (a @ weights[-1].T + biases[-1])[:, 0]

            # d(MSE)/d(out), then backpropagate through the stack
            delta = (2.0 / len(yb)) * (out - yb)
            if not np.isfinite(delta).all():
                raise TrainingDivergedError(
                    f"non-finite loss at epoch {epoch} (|out|_max = {np.abs(out).max():.3g})"
                )
            g = delta[:, None]  # (batch, 1)
            grads_w = [None] * len(weights)
            grads_b = [None] * len(weights)
            for i in range(len(weights) - 1, -1, -1):
                grads_w[i] = g.T @ acts[i]
                grads_b[i] = g.sum(axis=0)
                if i > 0:
                    g = (g @ weights[i]) * (pres[i - 1] > 0.0)

            t_adam += 1
            corr1 = 1.0 - beta1**t_adam
            corr2 = 1.0 - beta2**t_adam
            # overflow here surfaces as a non-finite loss on the next batch
            with np.errstate(all="ignore"):
                for i in range(len(weights)):
                    m_w[i] = beta1 * m_w[i] + (1 - beta1) * grads_w[i]
                    v_w[i] = beta2 * v_w[i] + (1 - beta2) * grads_w[i] ** 2
                    weights[i] -= arch.learning_rate * (m_w[i] / corr1) / (np.sqrt(v_w[i] / corr2) + eps)
                    m_b[i] = beta1 * m_b[i] + (1 - beta1) * grads_b[i]
                    v_b[i] = beta2 * v_b[i] + (1 - beta2) * grads_b[i] ** 2
                    biases[i] -= arch.learning_rate * (m_b[i] / corr1) / (np.sqrt(v_b[i] / corr2) + eps)

        train_err = smse(evaluate(zs, y), y, bounds)
        history.train_smse.append(train_err)
        if has_val:
            val_err = smse(evaluate(zvs, yv), yv, bounds)
            history.val_smse.append(val_err)
            key = val_err
        else:
            key = train_err
        if not np.isfinite(key):
            raise TrainingDivergedError(f"non-finite epoch SMSE at epoch {epoch}")
        if key < best_key:
            best_key = key
            best_state = ([w.copy() for w in weights], [b.copy() for b in biases])
            history.best_epoch = epoch
        elif epoch - history.best_epoch >= arch.patience:
            break
    history.epochs_run = len(history.train_smse)

    trained = MlpModel(
        weights=tuple(best_state[0]),
        biases=tuple(best_state[1]),
        l0=l0,
        y_bounds=bounds,
    )
    return trained.calibrated(), history
