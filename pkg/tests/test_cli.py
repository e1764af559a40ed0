import json

import numpy as np
import pytest

from springlattice.cli import run_cli
from springlattice.data import sampling_cube
from springlattice.serialize import load_model, read_dataset


def run(*argv):
    return run_cli([str(a) for a in argv])


@pytest.fixture
def oracle_data(tmp_path):
    path = tmp_path / "data.csv"
    assert run("gen-data", "--n", 200, "--seed", 7, "--out", path) == 0
    return path


def sim_config(tmp_path, **overrides):
    doc = {
        "lattice": {"rows": 3, "cols": 3, "phi0": 0.5, "xi": 0.0, "l0": 1.0, "density": 1.0},
        "model": {"kind": "oracle"},
        "protocol": {"kind": "none"},
        "dt": 0.01,
        "duration": 0.05,
        "snapshot_stride": 2,
        "seed": 3,
    }
    doc.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc))
    return path


class TestGenData:
    def test_writes_rows_inside_cube(self, tmp_path):
        out = tmp_path / "d.csv"
        assert run("gen-data", "--n", 1000, "--seed", 7, "--out", out) == 0
        ds = read_dataset(out)
        assert len(ds) == 1000
        lo, hi = sampling_cube(1.0)
        assert np.all(ds.inputs > lo) and np.all(ds.inputs < hi)
        manifest = json.loads((tmp_path / "gen-data.manifest.json").read_text())
        assert manifest["command"] == "gen-data" and manifest["seed"] == 7

    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run("gen-data", "--n", 50, "--seed", 9, "--out", a)
        run("gen-data", "--n", 50, "--seed", 9, "--out", b)
        assert a.read_bytes() == b.read_bytes()


class TestTrainEval:
    def test_train_gpr_and_eval(self, oracle_data, tmp_path, capsys):
        model_path = tmp_path / "model.json"
        code = run(
            "train", "--data", oracle_data, "--model", "gpr", "--seed", 0,
            "--restarts", 1, "--out", model_path,
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "validation smse" in out
        model = load_model(model_path)
        assert model.energy([0.0, 0.0, 0.0]) == 0.0

        eval_path = tmp_path / "eval.csv"
        assert run("eval", "--model", model_path, "--data", oracle_data, "--seed", 0, "--out", eval_path) == 0
        lines = eval_path.read_text().splitlines()
        assert lines[0] == "energy_true,energy_pred,scaled_true,scaled_pred"
        assert len(lines) == 1 + 20  # 10% of 200

    def test_train_mlp(self, oracle_data, tmp_path):
        cfg = tmp_path / "train.json"
        cfg.write_text(json.dumps({"mlp": {"hidden_layers": 1, "width": 8, "epochs": 30, "patience": 30}}))
        model_path = tmp_path / "mlp.json"
        assert run(
            "train", "--data", oracle_data, "--model", "mlp", "--config", cfg,
            "--seed", 1, "--out", model_path,
        ) == 0
        doc = json.loads(model_path.read_text())
        assert doc["kind"] == "mlp"

    def test_train_best_selects_by_validation(self, oracle_data, tmp_path, capsys):
        cfg = tmp_path / "train.json"
        cfg.write_text(json.dumps({"mlp": {"epochs": 10, "patience": 10}}))
        model_path = tmp_path / "best.json"
        assert run(
            "train", "--data", oracle_data, "--model", "best", "--config", cfg,
            "--seed", 0, "--restarts", 1, "--out", model_path,
        ) == 0
        out = capsys.readouterr().out
        assert "selected" in out and out.count("validation smse") >= 4
        assert json.loads(model_path.read_text())["kind"] in ("gpr", "mlp")

    def test_train_reproducible_bytes(self, oracle_data, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for out in (a, b):
            run("train", "--data", oracle_data, "--model", "gpr", "--seed", 4, "--restarts", 1, "--out", out)
        assert a.read_bytes() == b.read_bytes()


class TestContour:
    def test_emits_grids_with_minima_counts(self, tmp_path, capsys):
        assert run("contour", "--model", "oracle", "--d", -0.2, "--d", 0.2, "--outdir", tmp_path) == 0
        out = capsys.readouterr().out
        assert "2 local minima" in out and "1 local minima" in out
        files = sorted(tmp_path.glob("contour_d_*.csv"))
        assert len(files) == 2
        header = files[0].read_text().splitlines()[0]
        assert header == "theta_a,theta_b,energy"


class TestSimulate:
    def test_outputs_and_manifest(self, tmp_path):
        cfg = sim_config(tmp_path)
        outdir = tmp_path / "run"
        assert run("simulate", "--config", cfg, "--outdir", outdir) == 0
        assert (outdir / "scalars.csv").exists()
        assert (outdir / "lattice.json").exists()
        snaps = sorted(outdir.glob("snapshot_*.csv"))
        assert len(snaps) == 4  # steps 0, 2, 4, 5
        manifest = json.loads((outdir / "simulate.manifest.json").read_text())
        assert manifest["config"]["duration"] == 0.05

    def test_rerun_from_manifest_bitwise(self, tmp_path):
        cfg = sim_config(tmp_path, protocol={"kind": "uniaxial", "params": {"strain": -0.02, "axis": 1}},
                         damping={"c_v": 1.0, "c_omega": 0.1})
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        assert run("simulate", "--config", cfg, "--outdir", out1) == 0
        assert run("simulate", "--config", out1 / "simulate.manifest.json", "--outdir", out2) == 0
        for name in ["scalars.csv"] + [p.name for p in out1.glob("snapshot_*.csv")]:
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name

    def test_thread_flag_bitwise(self, tmp_path):
        cfg = sim_config(tmp_path, lattice={"rows": 4, "cols": 4, "phi0": 0.5, "xi": -0.1, "l0": 1.0})
        out1, out2 = tmp_path / "t1", tmp_path / "t2"
        assert run("simulate", "--config", cfg, "--outdir", out1, "--threads", 1) == 0
        assert run("simulate", "--config", cfg, "--outdir", out2, "--threads", 2) == 0
        assert (out1 / "scalars.csv").read_bytes() == (out2 / "scalars.csv").read_bytes()


class TestRelax:
    def test_relax_writes_state_and_report(self, tmp_path):
        cfg = sim_config(
            tmp_path,
            protocol={"kind": "uniaxial", "params": {"strain": 0.01, "axis": 1}},
            relax={"max_steps": 100000},
        )
        outdir = tmp_path / "relax"
        assert run("relax", "--config", cfg, "--outdir", outdir) == 0
        report = json.loads((outdir / "relax_report.json").read_text())
        assert report["converged"] is True
        assert (outdir / "relaxed.csv").exists()

    def test_nonconvergence_exits_nonzero(self, tmp_path, capsys):
        cfg = sim_config(
            tmp_path,
            protocol={"kind": "uniaxial", "params": {"strain": 0.01, "axis": 1}},
            relax={"max_steps": 5},
        )
        outdir = tmp_path / "relax"
        assert run("relax", "--config", cfg, "--outdir", outdir) == 1
        assert "did not converge" in capsys.readouterr().err
        assert (outdir / "relax_report.json").exists()


class TestWavespeed:
    def test_measures_chain(self, tmp_path):
        cfg = sim_config(
            tmp_path,
            lattice={"rows": 9, "cols": 1, "phi0": 0.5, "xi": 0.0, "l0": 1.0, "density": 2.0},
            model={"kind": "oracle", "coefficients": {"k_d": 1.0, "k_s": 0.0, "k_t": 0.0}},
            protocol={
                "kind": "custom",
                "prescriptions": [
                    {"nodes": "top", "component": "x2", "function": {"kind": "ramp", "rate": -0.05, "t_end": 2.0}}
                ],
            },
            duration=12.0,
            dt=0.02,
            tracked_row=0,
        )
        outdir = tmp_path / "wave"
        assert run("wavespeed", "--config", cfg, "--outdir", outdir, "--source-row", 8) == 0
        report = json.loads((outdir / "wavespeed.json").read_text())
        assert report["arrived"] is True
        assert report["speed"] == pytest.approx(1.0, rel=0.3)


class TestRender:
    def test_render_from_config(self, tmp_path):
        cfg = sim_config(tmp_path)
        out = tmp_path / "out.svg"
        assert run("render", "--config", cfg, "--out", out) == 0
        assert out.read_text().startswith("<?xml")

    def test_render_from_lattice_and_snapshot(self, tmp_path):
        cfg = sim_config(tmp_path)
        rundir = tmp_path / "run"
        run("simulate", "--config", cfg, "--outdir", rundir)
        out = tmp_path / "snap.svg"
        snap = sorted(rundir.glob("snapshot_*.csv"))[-1]
        assert run("render", "--lattice", rundir / "lattice.json", "--snapshot", snap, "--out", out) == 0
        assert "<line" in out.read_text()


class TestBench:
    def test_empty_report_for_zero_steps(self, tmp_path):
        assert run("bench", "--sizes", "2x2", "--steps", 0, "--outdir", tmp_path) == 0
        doc = json.loads((tmp_path / "bench.json").read_text())
        assert doc["entries"] == []

    def test_small_bench(self, tmp_path):
        assert run("bench", "--sizes", "2x2,3x3", "--steps", 2, "--reps", 5, "--outdir", tmp_path) == 0
        doc = json.loads((tmp_path / "bench.json").read_text())
        assert [e["n_edges"] for e in doc["entries"]] == [4, 12]
        assert all(e["per_step_mean"] > 0 for e in doc["entries"])


class TestErrors:
    def test_unknown_subcommand_exits_2(self, capsys):
        assert run("frobnicate") == 2

    def test_unknown_flag_exits_2(self, capsys):
        assert run("gen-data", "--bogus") == 2

    def test_missing_file_exits_1(self, tmp_path, capsys):
        assert run("eval", "--model", tmp_path / "nope.json", "--data", tmp_path / "nope.csv") == 1
        assert "error" in capsys.readouterr().err

    def test_bad_config_exits_1(self, tmp_path, capsys):
        cfg = tmp_path / "bad.json"
        cfg.write_text("{not json")
        assert run("simulate", "--config", cfg) == 1
        assert "not valid JSON" in capsys.readouterr().err

    def test_env_outdir(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SPRINGLATTICE_OUTDIR", str(tmp_path / "env_out"))
        assert run("gen-data", "--n", 10, "--seed", 0, "--out", "d.csv") == 0
        assert (tmp_path / "env_out" / "d.csv").exists()
