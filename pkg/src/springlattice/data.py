"""Feature sampling, dataset containers, splits, and the scaled error metric.

Training features live in the box (-pi/5, pi/5) x (-pi/5, pi/5) x
(-0.2 l0, 0.2 l0): moderate endpoint rotations and up to 20% elongation
either way.  Errors are reported as SMSE, the mean squared error of
min-max-scaled energies with the scaling bounds frozen from the
training targets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ANGLE_BOUND = np.pi / 5.0
ELONGATION_FRACTION = 0.2


@dataclass(frozen=True)
class Dataset:
    """Feature triples with scalar energy labels."""

    inputs: np.ndarray  # (n, 3), d in absolute length units
    outputs: np.ndarray  # (n,)
    provenance: str = ""

    def __post_init__(self):
        if len(self.inputs) != len(self.outputs):
            raise ValueError(f"{len(self.inputs)} inputs vs {len(self.outputs)} outputs")
        if len(self.inputs) and not (
            np.isfinite(self.inputs).all() and np.isfinite(self.outputs).all()
        ):
            raise ValueError("dataset contains non-finite values")
        self.inputs.flags.writeable = False
        self.outputs.flags.writeable = False

    def __len__(self) -> int:
        return len(self.outputs)


def sampling_cube(l0: float) -> np.ndarray:
    """Lower/upper feature bounds, shape (2, 3)."""
    d = ELONGATION_FRACTION * l0
    return np.array([[-ANGLE_BOUND, -ANGLE_BOUND, -d], [ANGLE_BOUND, ANGLE_BOUND, d]])


def sample_features(n: int, l0: float = 1.0, seed: int = 0) -> np.ndarray:
    """``n`` i.i.d. uniform feature triples from the sampling cube."""
    if n < 0:
        raise ValueError(f"sample count must be nonnegative, got {n}")
    lo, hi = sampling_cube(l0)
    return np.random.default_rng(seed).uniform(lo, hi, size=(n, 3))


def label_with_model(model, features, provenance: str = "") -> Dataset:
    """Dataset whose outputs are the model's energies at ``features``."""
    features = np.atleast_2d(np.asarray(features, dtype=float))
    return Dataset(features, np.asarray(model.energy(features), dtype=float), provenance)


@dataclass(frozen=True)
class DataSplit:
    """Disjoint train/validation/test index sets covering a dataset."""

    train: np.ndarray
    validation: np.ndarray
    test: np.ndarray

    def __post_init__(self):
        for arr in (self.train, self.validation, self.test):
            arr.flags.writeable = False


def split_dataset(n: int | Dataset, ratios=(0.8, 0.1, 0.1), seed: int = 0) -> DataSplit:
    """Shuffle and partition ``n`` samples (or a dataset) by ``ratios``."""
    size = len(n) if isinstance(n, Dataset) else int(n)
    if size < 10:
        raise ValueError(f"dataset of {size} entries is too small to split (need >= 10)")
    ratios = np.asarray(ratios, dtype=float)
    if ratios.shape != (3,) or abs(ratios.sum() - 1.0) > 1e-9 or (ratios < 0).any():
        raise ValueError(f"ratios must be 3 nonnegative numbers summing to 1, got {ratios}")
    perm = np.random.default_rng(seed).permutation(size)
    n_train = int(np.floor(size * ratios[0]))
    n_val = int(np.floor(size * ratios[1]))
    return DataSplit(
        train=np.sort(perm[:n_train]),
        validation=np.sort(perm[n_train : n_train + n_val]),
        test=np.sort(perm[n_train + n_val :]),
    )


def training_bounds(train_outputs) -> tuple[float, float]:
    """Min-max scaling bounds taken from the training targets."""
    y = np.asarray(train_outputs, dtype=float)
    lo, hi = float(y.min()), float(y.max())
    if not hi > lo:
        raise ValueError(f"degenerate scaling bounds [{lo}, {hi}]")
    return lo, hi


def smse(predictions, truths, bounds: tuple[float, float]) -> float:
    """Mean squared error of min-max-scaled values.

    ``bounds`` must come from the training targets (see training_bounds)
    so that errors on different splits share one scale.
    """
    pred = np.asarray(predictions, dtype=float)
    true = np.asarray(truths, dtype=float)
    if pred.shape != true.shape:
        raise ValueError(f"shape mismatch: {pred.shape} vs {true.shape}")
    lo, hi = bounds
    if not hi > lo:
        raise ValueError(f"degenerate scaling bounds [{lo}, {hi}]")
    scaled = (pred - true) / (hi - lo)
    return float(np.mean(scaled * scaled))
