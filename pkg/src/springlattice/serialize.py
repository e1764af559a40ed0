"""File formats: dataset CSV, model/lattice JSON, trajectory export, manifests.

All writes are atomic (temp file in the target directory, then rename),
so a crashed run never leaves a half-written artifact.  Floats are
written with 17 significant digits and therefore round-trip exactly.
"""

from __future__ import annotations

import json
import os
import tempfile
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .data import Dataset, sampling_cube
from .dynamics import SystemState, Trajectory
from .geometry import Lattice
from .models import AnalyticOracle, EdgeEnergyModel, GprHyperparams, GprModel, MlpModel
from .models.gpr import _factorize

DATASET_HEADER = "theta_a,theta_b,d,energy"
SNAPSHOT_HEADER = "node,x1,x2,theta,v1,v2,omega"
SCALAR_LOG_HEADER = "step,time,kinetic,potential,tracked_kinetic"


class SchemaError(ValueError):
    """A file does not match its expected schema."""


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_json(path, doc: dict) -> None:
    atomic_write_text(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _read_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from exc


# ------------------------------------------------------------------ datasets


def write_dataset(dataset: Dataset, path) -> None:
    lines = [DATASET_HEADER]
    for (ta, tb, d), y in zip(dataset.inputs, dataset.outputs):
        lines.append(f"{_fmt(ta)},{_fmt(tb)},{_fmt(d)},{_fmt(y)}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_dataset(path, l0: float | None = None) -> Dataset:
    """Read a feature/energy CSV.

    Malformed or non-finite rows raise SchemaError with their line
    number.  When ``l0`` is given, rows outside the sampling cube only
    warn: out-of-range samples are legal, just unusual.
    """
    path = Path(path)
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != DATASET_HEADER:
        found = lines[0].strip() if lines else "<empty file>"
        raise SchemaError(f"{path}:1: expected header {DATASET_HEADER!r}, found {found!r}")

    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise SchemaError(f"{path}:{lineno}: expected 4 fields, found {len(parts)}")
        try:
            values = [float(p) for p in parts]
        except ValueError as exc:
            raise SchemaError(f"{path}:{lineno}: {exc}") from exc
        if not all(np.isfinite(values)):
            raise SchemaError(f"{path}:{lineno}: non-finite value")
        rows.append(values)

    arr = np.asarray(rows, dtype=float).reshape(-1, 4)
    if l0 is not None and len(arr):
        lo, hi = sampling_cube(l0)
        outside = np.nonzero(((arr[:, :3] < lo) | (arr[:, :3] > hi)).any(axis=1))[0]
        if len(outside):
            warnings.warn(
                f"{path}: {len(outside)} rows outside the sampling cube "
                f"(first at line {outside[0] + 2})",
                stacklevel=2,
            )
    return Dataset(arr[:, :3], arr[:, 3], provenance=str(path))


# -------------------------------------------------------------------- models


def model_to_dict(model: EdgeEnergyModel) -> dict:
    if isinstance(model, GprModel):
        return {
            "kind": "gpr",
            "l0": model.l0,
            "reference_offset": model.reference_offset,
            "y_bounds": list(model.y_bounds) if model.y_bounds else None,
            "hyperparams": {
                "sigma2": model.hyperparams.sigma2,
                "length_scale": model.hyperparams.length_scale,
                "noise2": model.hyperparams.noise2,
            },
            "train_inputs_scaled": model.train_inputs.tolist(),
            "train_targets": model.train_targets.tolist(),
            "alpha": model.alpha.tolist(),
        }
    if isinstance(model, MlpModel):
        return {
            "kind": "mlp",
            "l0": model.l0,
            "reference_offset": model.reference_offset,
            "y_bounds": list(model.y_bounds) if model.y_bounds else None,
            "weights": [w.tolist() for w in model.weights],
            "biases": [b.tolist() for b in model.biases],
        }
    if isinstance(model, AnalyticOracle):
        return {
            "kind": "oracle",
            "reference_offset": model.reference_offset,
            "coefficients": {
                "k_d": model.k_d,
                "k_s": model.k_s,
                "k_t": model.k_t,
                "c_couple": model.c_couple,
                "q4": model.q4,
                "d_star": model.d_star,
            },
        }
    raise SchemaError(f"cannot serialize model type {type(model).__name__}")


def model_from_dict(doc: dict) -> EdgeEnergyModel:
    try:
        kind = doc["kind"]
    except (KeyError, TypeError):
        raise SchemaError("model document has no 'kind' field") from None
    try:
        if kind == "gpr":
            hp = GprHyperparams(**doc["hyperparams"])
            z = np.asarray(doc["train_inputs_scaled"], dtype=float).reshape(-1, 3)
            y = np.asarray(doc["train_targets"], dtype=float)
            alpha = np.asarray(doc["alpha"], dtype=float)
            if len(alpha) != len(z) or len(y) != len(z):
                raise SchemaError("gpr arrays have inconsistent lengths")
            _, lower = _factorize(z, hp)
            bounds = doc.get("y_bounds")
            return GprModel(
                train_inputs=z,
                train_targets=y,
                alpha=alpha,
                chol_lower=lower,
                hyperparams=hp,
                l0=float(doc["l0"]),
                y_bounds=tuple(bounds) if bounds else None,
                reference_offset=float(doc["reference_offset"]),
            )
        if kind == "mlp":
            bounds = doc.get("y_bounds")
            return MlpModel(
                weights=tuple(np.asarray(w, dtype=float) for w in doc["weights"]),
                biases=tuple(np.asarray(b, dtype=float) for b in doc["biases"]),
                l0=float(doc["l0"]),
                y_bounds=tuple(bounds) if bounds else None,
                reference_offset=float(doc["reference_offset"]),
            )
        if kind == "oracle":
            return AnalyticOracle(
                **doc["coefficients"], reference_offset=float(doc.get("reference_offset", 0.0))
            )
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed {kind!r} model document: {exc}") from exc
    raise SchemaError(f"unknown model kind {kind!r}")


def save_model(model: EdgeEnergyModel, path) -> None:
    _write_json(path, model_to_dict(model))


def load_model(path) -> EdgeEnergyModel:
    return model_from_dict(_read_json(path))


# ------------------------------------------------------------------ lattices


def save_lattice(lattice: Lattice, path) -> None:
    _write_json(path, lattice.to_dict())


def load_lattice(path) -> Lattice:
    doc = _read_json(path)
    try:
        return Lattice.from_dict(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"{path}: malformed lattice document: {exc}") from exc


# -------------------------------------------------------------- trajectories


def snapshot_csv(state: SystemState) -> str:
    lines = [SNAPSHOT_HEADER]
    for i in range(len(state.orientations)):
        x1, x2 = state.positions[i]
        v1, v2 = state.velocities[i]
        lines.append(
            f"{i},{_fmt(x1)},{_fmt(x2)},{_fmt(state.orientations[i])},"
            f"{_fmt(v1)},{_fmt(v2)},{_fmt(state.angular_velocities[i])}"
        )
    return "\n".join(lines) + "\n"


def write_snapshot(state: SystemState, path) -> None:
    atomic_write_text(path, snapshot_csv(state))


def read_snapshot(path) -> SystemState:
    path = Path(path)
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != SNAPSHOT_HEADER:
        raise SchemaError(f"{path}:1: expected header {SNAPSHOT_HEADER!r}")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 7:
            raise SchemaError(f"{path}:{lineno}: expected 7 fields, found {len(parts)}")
        rows.append([float(p) for p in parts[1:]])
    arr = np.asarray(rows, dtype=float).reshape(-1, 6)
    return SystemState(
        positions=arr[:, 0:2].copy(),
        orientations=arr[:, 2].copy(),
        velocities=arr[:, 3:5].copy(),
        angular_velocities=arr[:, 5].copy(),
    )


def export_trajectory(trajectory: Trajectory, out_dir) -> list[Path]:
    """Write one CSV per snapshot plus the per-step scalar log."""
    out_dir = Path(out_dir)
    written = []
    for state, step in zip(trajectory.snapshots, trajectory.snapshot_steps):
        path = out_dir / f"snapshot_{step:08d}.csv"
        write_snapshot(state, path)
        written.append(path)

    lines = [SCALAR_LOG_HEADER]
    for i, t in enumerate(trajectory.times):
        tracked = trajectory.tracked_kinetic[i] if trajectory.tracked_kinetic is not None else float("nan")
        lines.append(
            f"{i},{_fmt(t)},{_fmt(trajectory.kinetic[i])},"
            f"{_fmt(trajectory.potential[i])},{_fmt(tracked)}"
        )
    log_path = out_dir / "scalars.csv"
    atomic_write_text(log_path, "\n".join(lines) + "\n")
    written.append(log_path)
    return written


# ------------------------------------------------------------------ manifest


def write_manifest(path, command: str, config_doc: dict, seed: int | None) -> None:
    """Record what produced a run's outputs; rerunning the embedded config
    reproduces them bitwise."""
    _write_json(
        path,
        {
            "command": command,
            "config": config_doc,
            "seed": seed,
            "version": __version__,
        },
    )
