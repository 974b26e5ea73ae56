"""Command-line surface: config validation, file outputs, and exit codes."""

import csv
import json

import numpy as np
import pytest

from nsnorm import ConfigurationError, make_grid, random_solenoidal, single_mode
from nsnorm.cli import (
    CSV_COLUMNS,
    main,
    parse_config,
    read_diagnostics_csv,
    write_diagnostics_csv,
)
from nsnorm.snapshot import save_snapshot


def base_doc(**overrides):
    doc = {
        "grid": {"n": 16},
        "physics": {"nu": 0.1},
        "time": {"dt": 1e-3, "t_end": 0.01},
        "initial_condition": {"recipe": "taylor_green"},
    }
    doc.update(overrides)
    return doc


def write_config(tmp_path, doc, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def test_parse_config_accepts_the_minimal_document():
    cfg, outputs = parse_config(base_doc())
    assert cfg.grid.n == 16
    assert cfg.nu == 0.1
    assert cfg.initial_condition == "taylor_green"
    assert outputs == {}


def test_parse_config_routes_recipe_parameters():
    doc = base_doc(initial_condition={"recipe": "random", "k_max": 4.0,
                                      "amplitude": 0.5, "energy_slope": -2.0},
                   seed=3)
    cfg, _ = parse_config(doc)
    assert cfg.seed == 3
    assert cfg.ic_params == {"k_max": 4.0, "amplitude": 0.5, "energy_slope": -2.0}


@pytest.mark.parametrize("mutate", [
    lambda d: d.pop("physics"),
    lambda d: d.update(extra={}),
    lambda d: d["grid"].update(bogus=1),
    lambda d: d["physics"].update(gravity=9.8),
    lambda d: d["time"].pop("dt"),
    lambda d: d["initial_condition"].update(recipe="unknown"),
    lambda d: d["initial_condition"].update(k_max=4.0),  # not a taylor_green knob
    lambda d: d.update(seed="zero"),
    lambda d: d.update(outputs={"snapshot_every": -1}),
    lambda d: d["time"].update(t_end=0.0105),  # not a step multiple
])
def test_parse_config_fails_closed(mutate):
    doc = base_doc()
    mutate(doc)
    with pytest.raises(ConfigurationError):
        parse_config(doc)


def test_simulate_writes_the_expected_files(tmp_path):
    doc = base_doc(outputs={"every": 2, "snapshot_every": 2})
    out = tmp_path / "out"
    rc = main(["simulate", "--config", write_config(tmp_path, doc), "--out", str(out)])
    assert rc == 0

    with open(out / "diagnostics.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) - 1 == 6  # samples at steps 0,2,4,6,8,10
    times = [float(r[0]) for r in rows[1:]]
    assert times == pytest.approx([0.0, 2e-3, 4e-3, 6e-3, 8e-3, 1e-2])

    assert (out / "final.nsnl").is_file()
    assert (out / "snap_000004.nsnl").is_file()
    assert (out / "snap_000008.nsnl").is_file()

    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["exit_status"] == 0
    assert "diagnostics.csv" in manifest["outputs"]
    assert manifest["config"]["grid"]["n"] == 16


def test_simulate_rejects_bad_config_with_exit_2(tmp_path, capsys):
    doc = base_doc()
    doc["grid"]["bogus"] = 1
    out = tmp_path / "out"
    rc = main(["simulate", "--config", write_config(tmp_path, doc), "--out", str(out)])
    assert rc == 2
    assert "bogus" in capsys.readouterr().err


def test_diagnostics_csv_roundtrips_floats_exactly(tmp_path, grid16):
    from nsnorm.solver import diagnose

    records = [diagnose(random_solenoidal(grid16, seed=s)) for s in range(3)]
    path = tmp_path / "d.csv"
    write_diagnostics_csv(path, records)
    back = read_diagnostics_csv(path)
    for a, b in zip(records, back):
        assert a.energy == b.energy
        assert a.norms.l3 == b.norms.l3
        assert a.norms.lap_l2_sq == b.norms.lap_l2_sq
        assert a.stretching == b.stretching


def test_csv_reader_rejects_foreign_headers(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ConfigurationError):
        read_diagnostics_csv(path)


def test_audit_reads_viscosity_from_the_manifest(tmp_path):
    doc = base_doc(outputs={"every": 1})
    out = tmp_path / "out"
    assert main(["simulate", "--config", write_config(tmp_path, doc), "--out", str(out)]) == 0
    assert main(["audit", "--in", str(out)]) == 0

    payload = json.loads((out / "audit.json").read_text())
    assert payload["constants"]["nu"] == 0.1
    assert payload["residuals_ok"] is True
    assert payload["energy_residual_max"] <= 1e-3
    assert payload["verdict"]["decay_monotone"] is True
    assert payload["verdict"]["chain_ok"] is True


def test_audit_without_any_viscosity_exits_2(tmp_path, grid16):
    from nsnorm.solver import diagnose
    from nsnorm import SimulationConfig, run_simulation

    cfg = SimulationConfig(grid=grid16, nu=0.1, dt=1e-3, t_end=0.01,
                           initial_condition="taylor_green", output_every=1)
    records = run_simulation(cfg).records
    bare = tmp_path / "bare"
    bare.mkdir()
    write_diagnostics_csv(bare / "diagnostics.csv", records)
    assert main(["audit", "--in", str(bare)]) == 2          # no manifest, no --nu
    assert main(["audit", "--in", str(bare), "--nu", "0.1"]) == 0


def test_audit_on_missing_directory_exits_2(tmp_path):
    assert main(["audit", "--in", str(tmp_path / "nope"), "--nu", "0.1"]) == 2


def test_scale_check_passes_on_a_narrow_band_snapshot(tmp_path, grid32):
    snap = tmp_path / "f.nsnl"
    save_snapshot(snap, random_solenoidal(grid32, k_max=3.0, seed=90), nu=0.2)
    out = tmp_path / "sc"
    rc = main(["scale-check", "--snapshot", str(snap), "--lambda", "1,2",
               "--p", "2,3,4", "--out", str(out)])
    assert rc == 0
    with open(out / "scale_report.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["lambda", "p", "measured", "predicted", "abs_error"]
    lam1 = [r for r in rows[1:] if r[0] == "1" and r[1] in ("2", "3", "4")]
    for row in lam1:
        assert float(row[2]) == pytest.approx(1.0, abs=1e-12)


def test_scale_check_reports_band_overflow_with_exit_4(tmp_path, grid32):
    snap = tmp_path / "f.nsnl"
    save_snapshot(snap, random_solenoidal(grid32, k_max=3.0, seed=91), nu=0.2)
    rc = main(["scale-check", "--snapshot", str(snap), "--lambda", "64",
               "--p", "3", "--out", str(tmp_path / "sc4")])
    assert rc == 4


def test_scale_check_tolerates_degenerate_stretching(tmp_path, grid32):
    # unit-mode data has stretching at roundoff; the invariance gate must
    # treat it as degenerate instead of comparing two noise values
    snap = tmp_path / "sm.nsnl"
    save_snapshot(snap, single_mode(grid32), nu=0.1)
    rc = main(["scale-check", "--snapshot", str(snap), "--lambda", "2",
               "--p", "2,3", "--out", str(tmp_path / "sc_sm")])
    assert rc == 0


def test_scale_check_rejects_malformed_lists(tmp_path, grid32):
    snap = tmp_path / "f.nsnl"
    save_snapshot(snap, random_solenoidal(grid32, k_max=3.0, seed=92), nu=0.2)
    rc = main(["scale-check", "--snapshot", str(snap), "--lambda", "two",
               "--p", "3", "--out", str(tmp_path / "sc2")])
    assert rc == 2


def test_constants_run_is_reproducible(tmp_path):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    argv = ["constants", "--seeds", "0..4", "--n", "16", "--kmax", "3", "--slope", "-1"]
    assert main(argv + ["--out", str(out_a)]) == 0
    assert main(argv + ["--out", str(out_b)]) == 0
    blob_a = (out_a / "constants.json").read_bytes()
    assert blob_a == (out_b / "constants.json").read_bytes()
    payload = json.loads(blob_a)
    assert payload["count"] == 5
    assert payload["c_emp"] > 0.0
    assert payload["c_emp_label"].startswith("seed=")


def test_constants_rejects_a_malformed_seed_range(tmp_path):
    rc = main(["constants", "--seeds", "x..y", "--n", "16", "--kmax", "3",
               "--slope", "-1", "--out", str(tmp_path / "c")])
    assert rc == 2


def test_blow_up_exits_3_and_keeps_partial_diagnostics(tmp_path, capsys):
    doc = {
        "grid": {"n": 16},
        "physics": {"nu": 1e-4},
        "time": {"dt": 0.05, "t_end": 5.0},
        "initial_condition": {"recipe": "random", "k_max": 5.0, "amplitude": 50.0},
        "outputs": {"every": 1},
        "seed": 7,
    }
    out = tmp_path / "boom"
    rc = main(["simulate", "--config", write_config(tmp_path, doc), "--out", str(out)])
    assert rc == 3
    assert "non-finite state at step" in capsys.readouterr().err
    with open(out / "diagnostics.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) >= 2
    assert not (out / "final.nsnl").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["exit_status"] == 3


def test_repeated_simulations_write_identical_bytes(tmp_path):
    doc = base_doc(initial_condition={"recipe": "random", "k_max": 5.0},
                   outputs={"every": 1}, seed=11)
    cfg_path = write_config(tmp_path, doc)
    out_a, out_b = tmp_path / "r1", tmp_path / "r2"
    assert main(["simulate", "--config", cfg_path, "--out", str(out_a)]) == 0
    assert main(["simulate", "--config", cfg_path, "--out", str(out_b)]) == 0
    assert (out_a / "diagnostics.csv").read_bytes() == (out_b / "diagnostics.csv").read_bytes()
    assert (out_a / "final.nsnl").read_bytes() == (out_b / "final.nsnl").read_bytes()
