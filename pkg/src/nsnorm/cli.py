"""Batch front end.

Subcommands:

    simulate    --config PATH [--out DIR]
    audit       --in DIR [--nu F] [--c F] [--k F] [--energy-tol F] [--enstrophy-tol F] [--out DIR]
    scale-check --snapshot PATH --lambda L[,L...] --p P[,P...] [--rho0 F] [--out DIR]
    constants   --seeds A..B --n N --kmax K --slope S [--out DIR]

Every subcommand writes a manifest listing the files it emitted, even on
failure.  Exit codes: 0 success, 1 contract violation in computed results,
2 bad configuration or missing input, 3 blow-up (partial outputs kept),
4 rescale band overflow.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .balance import DiagnosticsRecord, attach_residuals, chain_report, estimate_constants
from .errors import (
    BlowUpError,
    ConfigurationError,
    InsufficientDataError,
    RescaleOverflowError,
    SnapshotFormatError,
)
from .fields import TWO_PI, make_grid
from .fixtures import random_solenoidal
from .norms import NormReport
from .regularity import PINNED_C_EMP, gronwall_audit
from .scaling import scaling_report
from .snapshot import load_snapshot, save_snapshot
from .solver import RECIPES, SimulationConfig, simulate

CSV_COLUMNS = (
    "t", "E", "L2", "L3", "L4", "grad2", "lap2",
    "Hhalf", "HhalfHom", "S", "energy_residual", "enstrophy_residual",
)

LADDER_TOL = 1e-9
LADDER_P3_TOL = 1e-10
HHALF_HOM_TOL = 1e-10
COVARIANCE_TOL = 1e-10
PRESSURE_TOL = 1e-10
CHAIN_INVARIANCE_TOL = 1e-9
CHAIN_DEGENERATE_FLOOR = 1e-12

_RECIPE_PARAMS = {
    "taylor_green": {"amplitude"},
    "abc": {"a", "b", "c"},
    "single_mode": {"component", "axis", "amplitude"},
    "random": {"energy_slope", "k_max", "amplitude"},
    "random_2d": {"energy_slope", "k_max", "amplitude"},
}


def _fmt(x) -> str:
    if x is None:
        return "nan"
    return format(float(x), ".17g")


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _reject_unknown(section: dict, allowed: set, where: str) -> None:
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ConfigurationError(f"unknown key(s) in {where}: {', '.join(unknown)}")


def _require(section: dict, keys: tuple, where: str) -> None:
    missing = sorted(k for k in keys if k not in section)
    if missing:
        raise ConfigurationError(f"missing key(s) in {where}: {', '.join(missing)}")


def parse_config(doc: dict) -> tuple[SimulationConfig, dict]:
    """Validate a config document fail-closed; returns (config, outputs section)."""
    if not isinstance(doc, dict):
        raise ConfigurationError("config document must be a JSON object")
    _reject_unknown(doc, {"grid", "physics", "time", "initial_condition", "outputs", "seed"}, "config")
    _require(doc, ("grid", "physics", "time", "initial_condition"), "config")

    grid_sec = doc["grid"]
    _reject_unknown(grid_sec, {"n", "length", "dealias_fraction"}, "grid")
    _require(grid_sec, ("n",), "grid")
    grid = make_grid(
        n=grid_sec["n"],
        length=float(grid_sec.get("length", TWO_PI)),
        dealias_fraction=float(grid_sec.get("dealias_fraction", 2.0 / 3.0)),
    )

    phys = doc["physics"]
    _reject_unknown(phys, {"nu", "rho0"}, "physics")
    _require(phys, ("nu",), "physics")

    time_sec = doc["time"]
    _reject_unknown(time_sec, {"dt", "t_end"}, "time")
    _require(time_sec, ("dt", "t_end"), "time")

    ic = dict(doc["initial_condition"])
    recipe = ic.pop("recipe", None)
    if recipe not in RECIPES:
        raise ConfigurationError(
            f"initial_condition.recipe must be one of {', '.join(RECIPES)}, got {recipe!r}"
        )
    _reject_unknown(ic, _RECIPE_PARAMS[recipe], f"initial_condition ({recipe})")

    outputs = doc.get("outputs", {})
    _reject_unknown(outputs, {"every", "dir", "snapshot_every"}, "outputs")
    every = outputs.get("every", 1)
    snapshot_every = outputs.get("snapshot_every", 0)
    if not isinstance(snapshot_every, int) or snapshot_every < 0:
        raise ConfigurationError(
            f"outputs.snapshot_every must be a non-negative integer, got {snapshot_every!r}"
        )

    seed = doc.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigurationError(f"seed must be an integer, got {seed!r}")

    cfg = SimulationConfig(
        grid=grid,
        nu=float(phys["nu"]),
        dt=float(time_sec["dt"]),
        t_end=float(time_sec["t_end"]),
        initial_condition=recipe,
        ic_params=ic,
        output_every=every if isinstance(every, int) else -1,
        seed=seed,
        rho0=float(phys.get("rho0", 1.0)),
    )
    cfg.n_steps  # validates that t_end is a step multiple
    return cfg, dict(outputs)


def _write_manifest(
    out_dir: Path, command: str, config_echo, outputs: list[str],
    exit_status: int, started: str,
) -> None:
    name = "manifest.json" if command == "simulate" else f"{command.replace('-', '_')}_manifest.json"
    payload = {
        "artifact_version": __version__,
        "command": command,
        "config": config_echo,
        "started_utc": started,
        "finished_utc": _utc_now(),
        "outputs": sorted(set(outputs)),
        "exit_status": exit_status,
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_diagnostics_csv(path: Path, records) -> None:
    with open(path, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in records:
            nm = r.norms
            writer.writerow([
                _fmt(r.t), _fmt(r.energy), _fmt(nm.l2), _fmt(nm.l3), _fmt(nm.l4),
                _fmt(nm.grad_l2_sq), _fmt(nm.lap_l2_sq), _fmt(nm.h_half_sq),
                _fmt(nm.h_half_hom_sq), _fmt(r.stretching),
                _fmt(r.energy_residual), _fmt(r.enstrophy_residual),
            ])


def read_diagnostics_csv(path: Path) -> list[DiagnosticsRecord]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != CSV_COLUMNS:
            raise ConfigurationError(f"{path}: unexpected or missing CSV header")
        records = []
        for row in reader:
            vals = [float(x) for x in row]
            rec = dict(zip(CSV_COLUMNS, vals))
            records.append(DiagnosticsRecord(
                t=rec["t"],
                energy=rec["E"],
                norms=NormReport(
                    l2=rec["L2"], l3=rec["L3"], l4=rec["L4"],
                    grad_l2_sq=rec["grad2"], lap_l2_sq=rec["lap2"],
                    h_half_sq=rec["Hhalf"], h_half_hom_sq=rec["HhalfHom"],
                ),
                stretching=rec["S"],
            ))
    if not records:
        raise ConfigurationError(f"{path}: no data rows")
    return records


def cmd_simulate(args) -> int:
    started = _utc_now()
    config_echo = None
    out_dir = Path(args.out) if args.out else Path(".")
    outputs: list[str] = []
    try:
        doc = json.loads(Path(args.config).read_text())
        config_echo = doc
        cfg, out_sec = parse_config(doc)
        if args.out is None and out_sec.get("dir"):
            out_dir = Path(out_sec["dir"])
        snapshot_every = out_sec.get("snapshot_every", 0)
    except (OSError, json.JSONDecodeError, ConfigurationError, TypeError) as err:
        print(f"error: {err}", file=sys.stderr)
        _write_manifest(out_dir, "simulate", config_echo, outputs, 2, started)
        return 2

    out_dir.mkdir(parents=True, exist_ok=True)
    records = []
    final_field = None
    status = 0
    try:
        for ordinal, (field, record) in enumerate(simulate(cfg)):
            records.append(record)
            final_field = field
            if snapshot_every and ordinal > 0 and ordinal % snapshot_every == 0:
                step_idx = int(round(field.time / cfg.dt))
                name = f"snap_{step_idx:06d}.nsnl"
                save_snapshot(out_dir / name, field, cfg.nu)
                outputs.append(name)
    except BlowUpError as err:
        print(f"error: {err}", file=sys.stderr)
        status = 3

    if len(records) >= 3:
        records = attach_residuals(records, cfg.nu)
    if records:
        write_diagnostics_csv(out_dir / "diagnostics.csv", records)
        outputs.append("diagnostics.csv")
    if status == 0 and final_field is not None:
        save_snapshot(out_dir / "final.nsnl", final_field, cfg.nu)
        outputs.append("final.nsnl")
    _write_manifest(out_dir, "simulate", config_echo, outputs, status, started)
    return status


def _verdict_payload(verdict) -> dict:
    return {
        "l3_at_t0": verdict.l3_at_t0,
        "l3_sq_at_t0": verdict.l3_sq_at_t0,
        "threshold": verdict.threshold,
        "satisfied": verdict.satisfied,
        "h_half_at_t0": verdict.h_half_at_t0,
        "poincare_k": verdict.poincare_k,
        "decay_monotone": verdict.decay_monotone,
        "max_enstrophy_over_initial": verdict.max_enstrophy_over_initial,
        "chain_residual_max": verdict.chain_residual_max,
        "chain_ok": verdict.chain_ok,
        "gronwall_residual_max": verdict.gronwall_residual_max,
        "gronwall_ok": verdict.gronwall_ok,
    }


def cmd_audit(args) -> int:
    started = _utc_now()
    in_dir = Path(args.in_dir)
    out_dir = Path(args.out) if args.out else in_dir
    outputs: list[str] = []

    nu = args.nu
    if nu is None:
        manifest_path = in_dir / "manifest.json"
        if manifest_path.is_file():
            try:
                nu = json.loads(manifest_path.read_text())["config"]["physics"]["nu"]
            except (KeyError, TypeError, json.JSONDecodeError):
                nu = None
    c_const = args.c if args.c is not None else (PINNED_C_EMP if PINNED_C_EMP > 0.0 else None)

    try:
        if nu is None:
            raise ConfigurationError("viscosity unknown: pass --nu or keep manifest.json beside the CSV")
        if c_const is None:
            raise ConfigurationError("no chain constant available: pass --c")
        records = read_diagnostics_csv(in_dir / "diagnostics.csv")
        records = attach_residuals(records, nu)
        verdict = gronwall_audit(records, nu, c_const, args.k)
    except (OSError, ConfigurationError, InsufficientDataError) as err:
        print(f"error: {err}", file=sys.stderr)
        _write_manifest(out_dir, "audit", None, outputs, 2, started)
        return 2

    e_max = max(abs(r.energy_residual) for r in records if r.energy_residual is not None)
    z_max = max(abs(r.enstrophy_residual) for r in records if r.enstrophy_residual is not None)

    chain_rows = []
    for snap in sorted(in_dir.glob("*.nsnl")):
        field, _ = load_snapshot(snap)
        report = chain_report(field)
        chain_rows.append({
            "snapshot": snap.name,
            "stretching_abs": report.stretching_abs,
            "holder_bound": report.holder_bound,
            "sobolev_ratio": report.sobolev_ratio,
            "chain_ratio": report.chain_ratio,
        })

    ok = e_max <= args.energy_tol and z_max <= args.enstrophy_tol
    payload = {
        "constants": {"nu": nu, "c": c_const, "k": args.k},
        "tolerances": {"energy": args.energy_tol, "enstrophy": args.enstrophy_tol},
        "energy_residual_max": e_max,
        "enstrophy_residual_max": z_max,
        "residuals_ok": ok,
        "verdict": _verdict_payload(verdict),
        "chain": chain_rows,
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "audit.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    outputs.append("audit.json")
    status = 0 if ok else 1
    _write_manifest(out_dir, "audit", None, outputs, status, started)
    return status


def _parse_number_list(text: str, kind) -> list:
    try:
        return [kind(part) for part in text.split(",") if part]
    except ValueError as err:
        raise ConfigurationError(f"bad list {text!r}: {err}") from None


def cmd_scale_check(args) -> int:
    started = _utc_now()
    out_dir = Path(args.out) if args.out else Path(".")
    outputs: list[str] = []
    try:
        lams = _parse_number_list(args.lambdas, int)
        ps = _parse_number_list(args.p, float)
        if not lams or not ps:
            raise ConfigurationError("need at least one lambda and one p")
        field, nu = load_snapshot(args.snapshot)
    except (OSError, SnapshotFormatError, ConfigurationError) as err:
        print(f"error: {err}", file=sys.stderr)
        _write_manifest(out_dir, "scale-check", None, outputs, 2, started)
        return 2

    rows = []
    all_ok = True
    for lam in lams:
        try:
            report = scaling_report(field, lam, ps, nu=nu, rho0=args.rho0)
        except RescaleOverflowError as err:
            print(f"error: lambda={lam}: {err}", file=sys.stderr)
            _write_manifest(out_dir, "scale-check", None, outputs, 4, started)
            return 4
        for row in report.ladder:
            err_abs = abs(row.measured - row.predicted)
            rows.append((lam, _fmt(row.p), row.measured, row.predicted, err_abs))
            tol = LADDER_P3_TOL if row.p == 3 else LADDER_TOL
            all_ok &= abs(row.measured / row.predicted - 1.0) <= tol
        rows.append((lam, "hhalf_hom", report.h_half_hom_ratio, 1.0,
                     abs(report.h_half_hom_ratio - 1.0)))
        all_ok &= abs(report.h_half_hom_ratio - 1.0) <= HHALF_HOM_TOL
        rows.append((lam, "hhalf_inhom", report.h_half_inhom_ratio, float("nan"), float("nan")))
        rows.append((lam, "ns_covariance", report.ns_residual_covariance, 0.0,
                     report.ns_residual_covariance))
        all_ok &= report.ns_residual_covariance <= COVARIANCE_TOL
        rows.append((lam, "pressure", report.pressure_mismatch, 0.0, report.pressure_mismatch))
        all_ok &= report.pressure_mismatch <= PRESSURE_TOL
        rows.append((lam, "chain_cell", report.chain_ratio_cell, report.chain_ratio_base,
                     abs(report.chain_ratio_cell - report.chain_ratio_base)))
        if report.chain_ratio_base > CHAIN_DEGENERATE_FLOOR:
            all_ok &= abs(report.chain_ratio_cell / report.chain_ratio_base - 1.0) <= CHAIN_INVARIANCE_TOL
        else:
            # stretching at roundoff scale (Beltrami or 2D data): both ratios
            # are noise, so require only that the rescaled one stays at noise
            all_ok &= report.chain_ratio_cell <= CHAIN_DEGENERATE_FLOOR

    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "scale_report.csv", "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("lambda", "p", "measured", "predicted", "abs_error"))
        for lam, label, measured, predicted, err_abs in rows:
            writer.writerow((lam, label, _fmt(measured), _fmt(predicted), _fmt(err_abs)))
    outputs.append("scale_report.csv")
    status = 0 if all_ok else 1
    _write_manifest(out_dir, "scale-check", None, outputs, status, started)
    return status


def cmd_constants(args) -> int:
    started = _utc_now()
    out_dir = Path(args.out) if args.out else Path(".")
    outputs: list[str] = []
    try:
        first, _, last = args.seeds.partition("..")
        seeds = list(range(int(first), int(last) + 1)) if last else [int(first)]
        if not seeds:
            raise ConfigurationError(f"empty seed range {args.seeds!r}")
        grid = make_grid(args.n)
    except (ValueError, ConfigurationError) as err:
        print(f"error: {err}", file=sys.stderr)
        _write_manifest(out_dir, "constants", None, outputs, 2, started)
        return 2

    fields = [
        random_solenoidal(grid, energy_slope=args.slope, k_max=args.kmax, seed=s)
        for s in seeds
    ]
    estimate = estimate_constants(fields, labels=[f"seed={s}" for s in seeds])
    payload = {
        "c_emp": estimate.c_emp,
        "c_emp_label": estimate.c_emp_label,
        "c_sob": estimate.c_sob,
        "c_sob_label": estimate.c_sob_label,
        "count": estimate.count,
        "corpus": {
            "seeds": args.seeds, "n": args.n,
            "k_max": args.kmax, "energy_slope": args.slope,
        },
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "constants.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    outputs.append("constants.json")
    _write_manifest(out_dir, "constants", None, outputs, 0, started)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nsnorm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a configured trajectory")
    p_sim.add_argument("--config", required=True)
    p_sim.add_argument("--out", default=None)
    p_sim.set_defaults(func=cmd_simulate)

    p_audit = sub.add_parser("audit", help="check budgets and decay on a finished run")
    p_audit.add_argument("--in", dest="in_dir", required=True)
    p_audit.add_argument("--nu", type=float, default=None)
    p_audit.add_argument("--c", type=float, default=None)
    p_audit.add_argument("--k", type=float, default=1.0)
    p_audit.add_argument("--energy-tol", type=float, default=1e-3)
    p_audit.add_argument("--enstrophy-tol", type=float, default=1e-3)
    p_audit.add_argument("--out", default=None)
    p_audit.set_defaults(func=cmd_audit)

    p_scale = sub.add_parser("scale-check", help="verify scaling laws on a snapshot")
    p_scale.add_argument("--snapshot", required=True)
    p_scale.add_argument("--lambda", dest="lambdas", required=True)
    p_scale.add_argument("--p", required=True)
    p_scale.add_argument("--rho0", type=float, default=1.0)
    p_scale.add_argument("--out", default=None)
    p_scale.set_defaults(func=cmd_scale_check)

    p_const = sub.add_parser("constants", help="estimate chain constants over a corpus")
    p_const.add_argument("--seeds", required=True)
    p_const.add_argument("--n", type=int, required=True)
    p_const.add_argument("--kmax", type=float, required=True)
    p_const.add_argument("--slope", type=float, required=True)
    p_const.add_argument("--out", default=None)
    p_const.set_defaults(func=cmd_constants)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
