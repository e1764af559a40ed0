"""Command-line pipeline: data generation, training, evaluation, simulation.

Every subcommand accepts ``--config`` (JSON) and ``--seed``; flags win
over config values.  Each run writes a ``<command>.manifest.json`` next
to its outputs echoing the fully resolved configuration, the seed, and
the package version; rerunning with that manifest as the config
reproduces the outputs bitwise.  The output directory resolves as
``--outdir``, then $SPRINGLATTICE_OUTDIR, then the config's
``output_dir``, then the current directory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .bench import bench_scaling
from .contour import count_local_minima, energy_grid, grid_csv
from .data import label_with_model, sample_features, split_dataset, training_bounds, smse
from .dynamics import (
    Damping,
    LoadProtocol,
    NodeLoad,
    Prescription,
    SimConfig,
    free_protocol,
    make_protocol,
    measure_wave_speed,
    quasi_static_relax,
    simulate,
)
from .geometry import EdgeListDefects, Lattice, LatticeSpec, PeriodicDefects, PoreShape, apply_defects, build_lattice
from .models import STANDARD_ARCHITECTURES, AnalyticOracle, MlpArchitecture, train_gpr, train_mlp
from .render import RenderOptions, render_svg
from .serialize import (
    SchemaError,
    atomic_write_text,
    export_trajectory,
    load_lattice,
    load_model,
    read_dataset,
    read_snapshot,
    save_lattice,
    save_model,
    write_dataset,
    write_manifest,
    write_snapshot,
)

ENV_OUTDIR = "SPRINGLATTICE_OUTDIR"


class CliError(Exception):
    """User-facing failure with a clean message."""


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise CliError(f"config {path} must be a JSON object")
    # accept a previous run's manifest directly
    if "config" in doc and "version" in doc and "command" in doc:
        doc = doc["config"]
    return doc


def _resolve_outdir(args, config: dict) -> Path:
    if getattr(args, "outdir", None):
        return Path(args.outdir)
    if os.environ.get(ENV_OUTDIR):
        return Path(os.environ[ENV_OUTDIR])
    if config.get("output_dir"):
        return Path(config["output_dir"])
    return Path(".")


def _out_path(outdir: Path, name: str | Path) -> Path:
    name = Path(name)
    return name if name.is_absolute() else outdir / name


def _config_base(args) -> Path:
    return Path(args.config).resolve().parent if getattr(args, "config", None) else Path.cwd()


def _lattice_from_config(config: dict) -> Lattice:
    doc = config.get("lattice")
    if doc is None:
        raise CliError("config needs a 'lattice' section (rows, cols, phi0, xi, l0, density)")
    shape = PoreShape(
        xi=float(doc.get("xi", 0.0)),
        phi0=float(doc.get("phi0", 0.5)),
        l0=float(doc.get("l0", 1.0)),
    )
    spec = LatticeSpec(
        rows=int(doc["rows"]),
        cols=int(doc["cols"]),
        shape=shape,
        density=float(doc.get("density", 1.0)),
        cross_inertia=doc.get("cross_inertia"),
    )
    lattice = build_lattice(spec)
    defects = config.get("defects")
    if defects:
        kind = defects.get("kind")
        if kind == "edges":
            lattice = apply_defects(lattice, EdgeListDefects.of(defects["edges"]))
        elif kind == "periodic":
            removed = tuple((int(r), int(c), str(o)) for r, c, o in defects["removed"])
            lattice = apply_defects(
                lattice,
                PeriodicDefects(int(defects["block_rows"]), int(defects["block_cols"]), removed),
            )
        else:
            raise CliError(f"unknown defects kind {kind!r}")
    return lattice


def _oracle_from_config(doc: dict | None) -> AnalyticOracle:
    coeffs = (doc or {}).get("coefficients")
    if coeffs is None:
        return AnalyticOracle.bistable()
    return AnalyticOracle(**{k: float(v) for k, v in coeffs.items()})


def _model_from_config(config: dict, base: Path):
    doc = config.get("model")
    if doc is None:
        raise CliError("config needs a 'model' section ({'kind': 'file'|'oracle', ...})")
    kind = doc.get("kind")
    if kind == "file":
        path = Path(doc["path"])
        if not path.is_absolute():
            path = base / path
        return load_model(path).calibrated()
    if kind == "oracle":
        return _oracle_from_config(doc).calibrated()
    raise CliError(f"unknown model kind {kind!r} (expected 'file' or 'oracle')")


def _node_set(spec, lattice: Lattice) -> np.ndarray:
    if spec == "top":
        return lattice.row_nodes(lattice.rows - 1)
    if spec == "bottom":
        return lattice.row_nodes(0)
    if isinstance(spec, dict) and "row" in spec:
        return lattice.row_nodes(int(spec["row"]))
    return np.asarray(spec, dtype=np.int64)


def _function_from_config(doc: dict):
    kind = doc.get("kind")
    if kind == "constant":
        value = float(doc["value"])
        return lambda t: value
    if kind == "ramp":
        rate = float(doc["rate"])
        t_end = float(doc.get("t_end", np.inf))
        return lambda t: rate * min(t, t_end)
    if kind == "sin":
        amplitude = float(doc["amplitude"])
        period = float(doc["period"])
        phase = float(doc.get("phase", 0.0))
        return lambda t: amplitude * np.sin(2.0 * np.pi * t / period + phase)
    raise CliError(f"unknown prescription function kind {kind!r}")


def _protocol_from_config(config: dict, lattice: Lattice) -> LoadProtocol:
    doc = config.get("protocol")
    if doc is None or doc.get("kind") in (None, "none", "free"):
        return free_protocol(lattice)
    kind = doc["kind"]
    params = doc.get("params", {})
    if kind in ("uniaxial", "impulse", "shear"):
        return make_protocol(kind, lattice, **params)
    if kind == "custom":
        prescriptions = [
            Prescription(
                nodes=_node_set(p["nodes"], lattice),
                component=p["component"],
                displacement=_function_from_config(p["function"]),
            )
            for p in doc.get("prescriptions", [])
        ]
        loads = []
        for l in doc.get("loads", []):
            force = l.get("force")
            torque = l.get("torque")
            loads.append(
                NodeLoad(
                    nodes=_node_set(l["nodes"], lattice),
                    force=(lambda t, f=tuple(force): f) if force is not None else None,
                    torque=(lambda t, tau=float(torque): tau) if torque is not None else None,
                )
            )
        return LoadProtocol(lattice.n_nodes, prescriptions, loads)
    raise CliError(f"unknown protocol kind {kind!r}")


def _damping_from_config(config: dict) -> Damping:
    doc = config.get("damping") or {}
    return Damping(c_v=float(doc.get("c_v", 0.0)), c_omega=float(doc.get("c_omega", 0.0)))


def _sim_config(config: dict, args) -> SimConfig:
    lattice = _lattice_from_config(config)
    model = _model_from_config(config, _config_base(args))
    protocol = _protocol_from_config(config, lattice)
    tracked = config.get("tracked_row")
    return SimConfig(
        lattice=lattice,
        model=model,
        protocol=protocol,
        duration=float(config.get("duration", 1.0)),
        dt=config.get("dt"),
        damping=_damping_from_config(config),
        snapshot_stride=int(config.get("snapshot_stride", 100)),
        seed=int(config.get("seed", 0)),
        tracked_nodes=lattice.row_nodes(int(tracked)) if tracked is not None else None,
        threads=args.threads,
    )


# ------------------------------------------------------------------ commands


def _cmd_gen_data(args) -> int:
    config = _load_config(args.config)
    n = args.n if args.n is not None else int(config.get("n", 1000))
    seed = args.seed if args.seed is not None else int(config.get("seed", 0))
    l0 = args.l0 if args.l0 is not None else float(config.get("l0", 1.0))
    oracle = _oracle_from_config(config.get("model")).calibrated()
    outdir = _resolve_outdir(args, config)
    out = _out_path(outdir, args.out)

    features = sample_features(n, l0=l0, seed=seed)
    dataset = label_with_model(oracle, features, provenance=f"oracle(seed={seed})")
    write_dataset(dataset, out)
    resolved = {
        "n": n,
        "l0": l0,
        "seed": seed,
        "model": {"kind": "oracle", "coefficients": _oracle_coeffs(oracle)},
        "out": str(out.resolve()),
    }
    write_manifest(out.parent / "gen-data.manifest.json", "gen-data", resolved, seed)
    print(f"wrote {n} samples to {out}")
    return 0


def _oracle_coeffs(oracle: AnalyticOracle) -> dict:
    return {
        "k_d": oracle.k_d,
        "k_s": oracle.k_s,
        "k_t": oracle.k_t,
        "c_couple": oracle.c_couple,
        "q4": oracle.q4,
        "d_star": oracle.d_star,
    }


def _cmd_train(args) -> int:
    config = _load_config(args.config)
    seed = args.seed if args.seed is not None else int(config.get("seed", 0))
    l0 = args.l0 if args.l0 is not None else float(config.get("l0", 1.0))
    outdir = _resolve_outdir(args, config)
    data_path = args.data or config.get("data")
    if data_path is None:
        raise CliError("train needs --data (or 'data' in the config)")
    out = _out_path(outdir, args.out)

    dataset = read_dataset(data_path, l0=l0)
    split = split_dataset(len(dataset), seed=seed)
    z, y = dataset.inputs, dataset.outputs
    bounds = training_bounds(y[split.train])

    candidates = []
    if args.model in ("gpr", "best"):
        restarts = int(config.get("gpr", {}).get("restarts", args.restarts))
        model = train_gpr(
            z[split.train], y[split.train], restarts=restarts, seed=seed, l0=l0, y_bounds=bounds
        )
        train_err = smse(model.energy(z[split.train]), y[split.train], bounds)
        val_err = smse(model.energy(z[split.validation]), y[split.validation], bounds)
        hp = model.hyperparams
        print(
            f"gpr: train smse {train_err:.3e}  validation smse {val_err:.3e}  "
            f"(sigma2 {hp.sigma2:.3f}, length scale {hp.length_scale:.3f}, noise2 {hp.noise2:.2e})"
        )
        candidates.append(("gpr", val_err, model))
    if args.model in ("mlp", "best"):
        if args.model == "best":
            # "best" sweeps the standard architectures; the config may cap
            # their epoch budget (the search is otherwise minutes-long)
            budget = config.get("mlp", {})
            archs = tuple(
                replace(
                    arch,
                    epochs=int(budget.get("epochs", arch.epochs)),
                    patience=int(budget.get("patience", arch.patience)),
                )
                for arch in STANDARD_ARCHITECTURES
            )
        else:
            archs = (_arch_from(args, config),)
        for i, arch in enumerate(archs, start=1):
            model, history = train_mlp(
                z[split.train], y[split.train], arch, seed=seed,
                val_features=z[split.validation], val_energies=y[split.validation], l0=l0,
            )
            val_err = history.val_smse[history.best_epoch]
            print(
                f"mlp#{i} ({arch.hidden_layers}x{arch.width}, lr {arch.learning_rate:g}): "
                f"train smse {history.train_smse[history.best_epoch]:.3e}  "
                f"validation smse {val_err:.3e}  ({history.epochs_run} epochs)"
            )
            candidates.append((f"mlp#{i}", val_err, model))

    name, val_err, model = min(candidates, key=lambda c: c[1])
    save_model(model, out)
    resolved = {
        "data": str(Path(data_path).resolve()),
        "model": args.model,
        "seed": seed,
        "l0": l0,
        "out": str(out.resolve()),
    }
    write_manifest(out.parent / "train.manifest.json", "train", resolved, seed)
    print(f"selected {name} by validation smse ({val_err:.3e}); saved to {out}")
    return 0


def _arch_from(args, config: dict) -> MlpArchitecture:
    if args.arch is not None:
        return STANDARD_ARCHITECTURES[args.arch - 1]
    doc = config.get("mlp")
    if not doc:
        return STANDARD_ARCHITECTURES[0]
    return MlpArchitecture(
        hidden_layers=int(doc.get("hidden_layers", 2)),
        width=int(doc.get("width", 32)),
        learning_rate=float(doc.get("learning_rate", 4e-4)),
        batch_size=int(doc.get("batch_size", 32)),
        epochs=int(doc.get("epochs", 2000)),
        patience=int(doc.get("patience", 200)),
    )


def _cmd_eval(args) -> int:
    config = _load_config(args.config)
    seed = args.seed if args.seed is not None else int(config.get("seed", 0))
    outdir = _resolve_outdir(args, config)
    model = load_model(args.model)
    dataset = read_dataset(args.data)
    split = split_dataset(len(dataset), seed=seed)
    z, y = dataset.inputs, dataset.outputs
    bounds = getattr(model, "y_bounds", None) or training_bounds(y[split.train])

    truth = y[split.test]
    pred = np.asarray(model.energy(z[split.test]))
    err = smse(pred, truth, bounds)
    lo, hi = bounds
    lines = ["energy_true,energy_pred,scaled_true,scaled_pred"]
    for t, p in zip(truth, pred):
        lines.append(
            f"{t:.17g},{p:.17g},{(t - lo) / (hi - lo):.17g},{(p - lo) / (hi - lo):.17g}"
        )
    out = _out_path(outdir, args.out)
    atomic_write_text(out, "\n".join(lines) + "\n")
    resolved = {"model": str(Path(args.model).resolve()), "data": str(Path(args.data).resolve()), "seed": seed}
    write_manifest(out.parent / "eval.manifest.json", "eval", resolved, seed)
    print(f"test smse {err:.3e} on {len(truth)} held-out samples; table in {out}")
    return 0


def _cmd_contour(args) -> int:
    config = _load_config(args.config)
    outdir = _resolve_outdir(args, config)
    if args.model == "oracle":
        model = _oracle_from_config(config.get("model")).calibrated()
    else:
        model = load_model(args.model).calibrated()
    l0 = args.l0 if args.l0 is not None else float(config.get("l0", 1.0))
    d_values = args.d if args.d else [-0.2, 0.2]
    outdir.mkdir(parents=True, exist_ok=True)
    for d_frac in d_values:
        d = d_frac * l0
        axis_a, axis_b, grid = energy_grid(model, d, resolution=args.resolution)
        path = outdir / f"contour_d_{d_frac:+.4f}.csv"
        atomic_write_text(path, grid_csv(axis_a, axis_b, grid))
        print(f"d = {d_frac:+.3f} l0: {count_local_minima(grid)} local minima; grid in {path}")
    resolved = {"model": args.model, "d": list(d_values), "resolution": args.resolution, "l0": l0}
    write_manifest(outdir / "contour.manifest.json", "contour", resolved, args.seed)
    return 0


def _cmd_simulate(args) -> int:
    config = _load_config(args.config)
    if args.seed is not None:
        config["seed"] = args.seed
    outdir = _resolve_outdir(args, config)
    sim = _sim_config(config, args)
    trajectory = simulate(sim)
    outdir.mkdir(parents=True, exist_ok=True)
    written = export_trajectory(trajectory, outdir)
    save_lattice(sim.lattice, outdir / "lattice.json")
    write_manifest(outdir / "simulate.manifest.json", "simulate", config, sim.seed)
    print(
        f"{len(trajectory.times) - 1} steps (dt {trajectory.dt:.3e}); "
        f"final kinetic {trajectory.kinetic[-1]:.6e}, potential {trajectory.potential[-1]:.6e}; "
        f"{len(written)} files in {outdir}"
    )
    return 0


def _cmd_relax(args) -> int:
    config = _load_config(args.config)
    if args.seed is not None:
        config["seed"] = args.seed
    outdir = _resolve_outdir(args, config)
    lattice = _lattice_from_config(config)
    model = _model_from_config(config, _config_base(args))
    protocol = _protocol_from_config(config, lattice)
    opts = config.get("relax", {})
    damping = _damping_from_config(config) if config.get("damping") else None
    result = quasi_static_relax(
        lattice,
        model,
        protocol,
        damping=damping,
        dt=config.get("dt"),
        ramp_time=opts.get("ramp_time"),
        tol_force=opts.get("tol_force"),
        tol_torque=opts.get("tol_torque"),
        max_steps=int(opts.get("max_steps", 1_000_000)),
        perturb_orientations=float(opts.get("perturb_orientations", 0.0)),
        seed=int(config.get("seed", 0)),
        threads=args.threads,
    )
    outdir.mkdir(parents=True, exist_ok=True)
    write_snapshot(result.state, outdir / "relaxed.csv")
    save_lattice(lattice, outdir / "lattice.json")
    report = {
        "converged": result.converged,
        "steps": result.steps,
        "dt": result.dt,
        "residual_force": result.residual_force,
        "residual_torque": result.residual_torque,
    }
    atomic_write_text(outdir / "relax_report.json", json.dumps(report, indent=2, sort_keys=True) + "\n")
    write_manifest(outdir / "relax.manifest.json", "relax", config, int(config.get("seed", 0)))
    if not result.converged:
        print(
            f"springlattice: error: relaxation did not converge in {result.steps} steps "
            f"(residual force {result.residual_force:.3e}, torque {result.residual_torque:.3e}); "
            f"report in {outdir / 'relax_report.json'}",
            file=sys.stderr,
        )
        return 1
    print(
        f"relaxed in {result.steps} steps; residual force {result.residual_force:.3e}, "
        f"torque {result.residual_torque:.3e}; state in {outdir / 'relaxed.csv'}"
    )
    return 0


def _cmd_wavespeed(args) -> int:
    config = _load_config(args.config)
    if args.seed is not None:
        config["seed"] = args.seed
    if args.target_row is not None:
        config["tracked_row"] = args.target_row
    if config.get("tracked_row") is None:
        raise CliError("wavespeed needs --target-row (or 'tracked_row' in the config)")
    outdir = _resolve_outdir(args, config)
    sim = _sim_config(config, args)
    trajectory = simulate(sim)
    source_row = args.source_row if args.source_row is not None else int(config.get("source_row", sim.lattice.rows - 1))
    result = measure_wave_speed(
        trajectory,
        sim.lattice,
        source_row=source_row,
        target_row=int(config["tracked_row"]),
        threshold_fraction=args.threshold,
    )
    outdir.mkdir(parents=True, exist_ok=True)
    report = {
        "arrived": result.arrived,
        "speed": result.speed,
        "arrival_time": result.arrival_time,
        "distance": result.distance,
        "peak_kinetic": result.peak_kinetic,
        "threshold": result.threshold,
    }
    atomic_write_text(outdir / "wavespeed.json", json.dumps(report, indent=2, sort_keys=True) + "\n")
    write_manifest(outdir / "wavespeed.manifest.json", "wavespeed", config, int(config.get("seed", 0)))
    if not result.arrived:
        print("springlattice: error: no wave arrival within the trajectory", file=sys.stderr)
        return 1
    print(f"wave speed {result.speed:.6g} (arrival at t = {result.arrival_time:.6g})")
    return 0


def _cmd_render(args) -> int:
    config = _load_config(args.config)
    outdir = _resolve_outdir(args, config)
    if args.lattice:
        lattice = load_lattice(args.lattice)
    elif config:
        lattice = _lattice_from_config(config)
    else:
        raise CliError("render needs --lattice or a --config with a lattice section")
    positions = orientations = None
    if args.snapshot:
        state = read_snapshot(args.snapshot)
        positions, orientations = state.positions, state.orientations
    options = RenderOptions(arm_fraction=args.arm_fraction)
    svg = render_svg(lattice, positions, orientations, options)
    out = _out_path(outdir, args.out)
    atomic_write_text(out, svg)
    write_manifest(
        out.parent / "render.manifest.json",
        "render",
        {"lattice": args.lattice, "snapshot": args.snapshot, "out": str(out.resolve())},
        args.seed,
    )
    print(f"wrote {out}")
    return 0


def _parse_sizes(text: str) -> list[tuple[int, int]]:
    sizes = []
    for part in text.split(","):
        rows, _, cols = part.strip().partition("x")
        if not cols:
            raise CliError(f"size {part!r} is not of the form ROWSxCOLS")
        sizes.append((int(rows), int(cols)))
    return sizes


def _cmd_bench(args) -> int:
    config = _load_config(args.config)
    outdir = _resolve_outdir(args, config)
    if args.model == "oracle":
        model = _oracle_from_config(config.get("model"))
    else:
        model = load_model(args.model)
    sizes = _parse_sizes(args.sizes)
    report = bench_scaling(
        sizes, model, steps=args.steps, repetitions=args.reps, threads=args.threads, seed=args.seed or 0
    )
    outdir.mkdir(parents=True, exist_ok=True)
    out = outdir / "bench.json"
    atomic_write_text(out, json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    for e in report.entries:
        if e.error:
            print(f"{e.rows}x{e.cols}: {e.error}")
        else:
            print(
                f"{e.rows}x{e.cols}: {e.n_edges} edges, "
                f"{e.per_step_mean * 1e3:.2f} +/- {e.per_step_std * 1e3:.2f} ms/step"
            )
    write_manifest(
        outdir / "bench.manifest.json",
        "bench",
        {"sizes": args.sizes, "steps": args.steps, "reps": args.reps, "model": args.model, "threads": args.threads},
        args.seed,
    )
    print(f"report in {out}")
    return 0


# --------------------------------------------------------------------- wiring


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="springlattice",
        description="Cross-spring lattice pipeline: generate data, train edge-energy models, simulate.",
    )
    parser.add_argument("--version", action="version", version=f"springlattice {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config (a previous manifest also works)")
        p.add_argument("--seed", type=int, default=None, help="seed override")
        p.add_argument("--threads", type=int, default=1, help="force-assembly worker threads")
        p.add_argument("--outdir", help=f"output directory (or ${ENV_OUTDIR})")

    p = sub.add_parser("gen-data", help="sample feature triples and label them with the analytic oracle")
    common(p)
    p.add_argument("--n", type=int, default=None, help="sample count (default 1000)")
    p.add_argument("--l0", type=float, default=None, help="unit-cell length (default 1.0)")
    p.add_argument("--out", default="data.csv")
    p.set_defaults(func=_cmd_gen_data)

    p = sub.add_parser("train", help="fit an edge-energy model on a dataset CSV")
    common(p)
    p.add_argument("--data", help="dataset CSV path")
    p.add_argument("--model", choices=("gpr", "mlp", "best"), default="gpr")
    p.add_argument("--arch", type=int, choices=(1, 2, 3), default=None, help="standard MLP architecture")
    p.add_argument("--restarts", type=int, default=8, help="hyperparameter optimizer restarts")
    p.add_argument("--l0", type=float, default=None)
    p.add_argument("--out", default="model.json")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="held-out test error and prediction table for a saved model")
    common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", default="eval.csv")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("contour", help="energy grids over the rotation features at fixed elongations")
    common(p)
    p.add_argument("--model", default="oracle", help="model JSON path or 'oracle'")
    p.add_argument("--d", type=float, action="append", help="elongation in units of l0 (repeatable)")
    p.add_argument("--resolution", type=int, default=41)
    p.add_argument("--l0", type=float, default=None)
    p.set_defaults(func=_cmd_contour)

    p = sub.add_parser("simulate", help="integrate a configured run and export the trajectory")
    common(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("relax", help="damped quasi-static relaxation to equilibrium")
    common(p)
    p.set_defaults(func=_cmd_relax)

    p = sub.add_parser("wavespeed", help="simulate and measure arrival-time wave speed")
    common(p)
    p.add_argument("--source-row", type=int, default=None)
    p.add_argument("--target-row", type=int, default=None)
    p.add_argument("--threshold", type=float, default=0.01)
    p.set_defaults(func=_cmd_wavespeed)

    p = sub.add_parser("render", help="SVG snapshot of a lattice configuration")
    common(p)
    p.add_argument("--lattice", help="lattice JSON path")
    p.add_argument("--snapshot", help="snapshot CSV path")
    p.add_argument("--arm-fraction", type=float, default=0.4)
    p.add_argument("--out", default="lattice.svg")
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("bench", help="per-step wall-time scaling across lattice sizes")
    common(p)
    p.add_argument("--sizes", default="2x2,8x8,16x16", help="comma-separated ROWSxCOLS list")
    p.add_argument("--steps", type=int, default=5)
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--model", default="oracle", help="model JSON path or 'oracle'")
    p.set_defaults(func=_cmd_bench)

    return parser


def run_cli(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (CliError, SchemaError, ValueError, OSError) as exc:
        print(f"springlattice: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
