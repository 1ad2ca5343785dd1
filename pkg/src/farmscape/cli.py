"""Command-line surface: one subcommand per pipeline stage.

Every subcommand resolves a RunConfig (file plus flag overrides),
writes its documented outputs into --out, and drops the fully resolved
config and a manifest next to them.  Exit codes: 0 ok, 1 runtime
failure (one-line diagnostic on stderr), 2 usage.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from importlib import resources
from pathlib import Path

from . import calibration as calib
from . import scenarios as scen
from .config import (
    PROFILE_CHOICES,
    RunConfig,
    load_config,
    with_overrides,
    write_config,
)
from .ecology import write_ne_summary
from .landscape import landscape_stats, params_for_farm, generate, save_raster
from .runner import _sim_task, aggregate, pmap, replicate_seeds, resolve_farm

USAGE_EXIT = 2
RUNTIME_EXIT = 1

SIMULATE_COLUMNS = (
    "replicate",
    "seed",
    "ne_density",
    "ne_density_crop",
    "L",
    "S",
    "g",
    "h",
    "pi",
    "ybar",
    "production",
    "revenue",
    "costs",
    "profit",
    "labor",
    "income",
)


def default_targets_path() -> Path:
    return Path(str(resources.files("farmscape").joinpath("data/fadn_targets.csv")))


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def _write_csv(path: Path, columns: tuple[str, ...], rows: list[list]) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _prepare_out(cfg: RunConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_config(cfg, out / "config_resolved.toml")
    return out


def _manifest_entry(cfg: RunConfig, settings, rows: int) -> dict:
    entry = {
        "seed": cfg.seed,
        "profile": cfg.profile,
        "replicates": cfg.resolved_replicates,
        "rows": rows,
        "config": "config_resolved.toml",
    }
    if settings is not None:
        entry["settings"] = dataclasses.asdict(settings)
    return entry


def _cmd_generate_landscape(cfg: RunConfig, args) -> int:
    out = _prepare_out(cfg)
    params = params_for_farm(
        args.farm_size,
        seed=cfg.seed,
        mean_field_size=args.field_size,
        hedgerow_share=args.hedgerow_share,
        grassland_share=args.grassland_share,
        grid_rows=cfg.grid_rows,
        grid_cols=cfg.grid_cols,
        cell_area=cfg.cell_area,
    )
    ls = generate(params)
    save_raster(ls, out / args.raster)
    stats = landscape_stats(ls)
    with open(out / "landscape_stats.json", "w") as fh:
        json.dump(dataclasses.asdict(stats), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def _cmd_simulate(cfg: RunConfig, args) -> int:
    out = _prepare_out(cfg)
    spec = resolve_farm(
        args.farm_size,
        pi=args.pi,
        econ=cfg.econ,
        grid_rows=cfg.grid_rows,
        grid_cols=cfg.grid_cols,
        cell_area=cfg.cell_area,
    )
    reps = cfg.resolved_replicates
    seeds = replicate_seeds(cfg.seed, reps, "simulate", str(args.farm_size))
    tasks = [(spec, seed, cfg.eco, cfg.econ) for seed in seeds]
    results = pmap(_sim_task, tasks, cfg.jobs)
    row = aggregate(spec, list(results))

    lines = []
    for k, (seed, rep) in enumerate(zip(seeds, results)):
        lines.append(
            [
                k,
                seed,
                rep.ne_density,
                rep.crop_density,
                rep.report.L,
                rep.report.S,
                rep.report.g,
                rep.report.h,
                rep.report.pi,
                rep.report.mean_yield,
                rep.report.production,
                rep.report.revenue,
                rep.report.costs,
                rep.report.profit,
                rep.report.labor,
                rep.report.income,
            ]
        )
    _write_csv(out / "simulate.csv", SIMULATE_COLUMNS, lines)
    summary = {
        "farm_size": spec.farm_size,
        "mean_field_size": spec.mean_field_size,
        "hedgerow_share": spec.hedgerow_share,
        "grassland_share": spec.grassland_share,
        "pi": spec.pi,
        "replicates": row.replicates,
        "ne_density": row.ne_density,
        "ne_density_crop": row.crop_density,
        "mean_yield": row.mean_yield,
        "production": row.production,
        "revenue": row.revenue,
        "costs": row.costs,
        "profit": row.profit,
        "labor": row.labor,
        "income": row.income,
    }
    write_ne_summary(summary, out / "simulate_summary.json")
    return 0


def _sweep_settings(cfg: RunConfig, args) -> scen.SweepSettings:
    pi_max = args.pi_max if args.pi_max is not None else 200.0
    pi_step = args.pi_step if args.pi_step is not None else 10.0
    if pi_step <= 0 or pi_max <= 0:
        raise ValueError("pi grid bounds must be positive")
    steps = int(round(pi_max / pi_step))
    grid = tuple(i * pi_step for i in range(steps + 1))
    return scen.SweepSettings(
        pi_grid=grid,
        replicates=cfg.resolved_replicates,
        grid_rows=cfg.grid_rows,
        grid_cols=cfg.grid_cols,
        cell_area=cfg.cell_area,
    )


def _cmd_sweep_fig3(cfg: RunConfig, args) -> int:
    out = _prepare_out(cfg)
    settings = _sweep_settings(cfg, args)
    rows = scen.sweep_pesticide(settings, cfg.seed, cfg.eco, cfg.jobs)
    scen.write_rows(out / "fig3.csv", scen.FIG3_COLUMNS, rows)
    scen.write_manifest(
        out / "manifest.json", {"fig3.csv": _manifest_entry(cfg, settings, len(rows))}
    )
    return 0


def _cmd_policy_grid(cfg: RunConfig, args) -> int:
    out = _prepare_out(cfg)
    settings = scen.PolicySettings(
        replicates=cfg.resolved_replicates,
        grid_rows=cfg.grid_rows,
        grid_cols=cfg.grid_cols,
        cell_area=cfg.cell_area,
    )
    rows = scen.policy_grid(settings, cfg.seed, cfg.eco, cfg.econ, cfg.jobs)
    scen.write_rows(out / "fig4.csv", scen.FIG4_COLUMNS, rows)
    scen.write_manifest(
        out / "manifest.json", {"fig4.csv": _manifest_entry(cfg, settings, len(rows))}
    )
    return 0


def _cmd_phase_diagram(cfg: RunConfig, args) -> int:
    out = _prepare_out(cfg)
    settings = scen.PhaseSettings(
        replicates=cfg.resolved_replicates,
        grid_rows=cfg.grid_rows,
        grid_cols=cfg.grid_cols,
        cell_area=cfg.cell_area,
    )
    rows = scen.phase_diagram(settings, cfg.seed, cfg.eco, cfg.econ, cfg.jobs)
    scen.write_rows(out / "fig5.csv", scen.FIG5_COLUMNS, rows)
    scen.write_manifest(
        out / "manifest.json", {"fig5.csv": _manifest_entry(cfg, settings, len(rows))}
    )
    return 0


def _calibration_spec(cfg: RunConfig, targets_arg: str | None) -> calib.CalibrationSpec:
    path = targets_arg or cfg.targets_path or default_targets_path()
    targets = calib.load_targets(path)
    grid = cfg.resolved_calibration_grid
    return calib.CalibrationSpec(
        targets=targets,
        sample_count=cfg.resolved_sobol_points,
        replicates=cfg.resolved_replicates,
        grid_rows=grid,
        grid_cols=grid,
        cell_area=cfg.cell_area,
    )


def _cmd_calibrate(cfg: RunConfig, args) -> int:
    out = _prepare_out(cfg)
    spec = _calibration_spec(cfg, args.targets)
    result = calib.calibrate(spec, cfg.seed, cfg.eco, cfg.econ, cfg.jobs)
    calib.write_report(
        result, out / "calibration_report.csv", out / "calibration_summary.json"
    )
    damage = calib.best_damage_by_bin(spec, result, cfg.seed, cfg.eco, cfg.econ, cfg.jobs)
    econ_best = dataclasses.replace(cfg.econ, **result.params_dict)
    calib.write_fit(spec, damage, econ_best, out / "calibration_fit.csv")
    scen.write_manifest(
        out / "manifest.json",
        {
            "calibration_report.csv": _manifest_entry(cfg, None, len(result.audit)),
            "calibration_fit.csv": _manifest_entry(cfg, None, len(spec.targets)),
        },
    )
    return 0


def _cmd_sensitivity(cfg: RunConfig, args) -> int:
    out = _prepare_out(cfg)
    spec = _calibration_spec(cfg, args.targets)
    sweep = scen.SweepSettings(
        replicates=cfg.resolved_replicates,
        grid_rows=cfg.grid_rows,
        grid_cols=cfg.grid_cols,
        cell_area=cfg.cell_area,
    )
    policy = scen.PolicySettings(
        replicates=cfg.resolved_replicates,
        grid_rows=cfg.grid_rows,
        grid_cols=cfg.grid_cols,
        cell_area=cfg.cell_area,
    )
    rows, meta = scen.sensitivity(
        args.variant, spec, cfg.seed, cfg.eco, cfg.econ, sweep, policy, cfg.jobs
    )
    name = f"sens_{args.variant}.csv"
    scen.write_rows(out / name, scen.SENS_COLUMNS, rows)
    with open(out / f"sens_{args.variant}_summary.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    scen.write_manifest(
        out / "manifest.json", {name: _manifest_entry(cfg, sweep, len(rows))}
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML config file")
    common.add_argument("--seed", type=int, help="master seed override")
    common.add_argument("--out", help="output directory")
    common.add_argument("--replicates", type=int, help="replicate count override")
    common.add_argument("--profile", choices=PROFILE_CHOICES, help="parameter profile")
    common.add_argument("--jobs", type=int, help="worker processes")

    parser = argparse.ArgumentParser(
        prog="farmscape",
        description="Synthetic farmland, natural-enemy dynamics, farm economics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate-landscape", parents=[common])
    p.add_argument("--farm-size", type=float, required=True)
    p.add_argument("--field-size", type=float, help="override the scaling law")
    p.add_argument("--hedgerow-share", type=float)
    p.add_argument("--grassland-share", type=float)
    p.add_argument("--raster", default="landscape.txt")
    p.set_defaults(fn=_cmd_generate_landscape)

    p = sub.add_parser("simulate", parents=[common])
    p.add_argument("--farm-size", type=float, required=True)
    p.add_argument("--pi", type=float, help="override the expenditure law")
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("sweep-fig3", parents=[common])
    p.add_argument("--pi-max", type=float)
    p.add_argument("--pi-step", type=float)
    p.set_defaults(fn=_cmd_sweep_fig3)

    p = sub.add_parser("policy-grid", parents=[common])
    p.set_defaults(fn=_cmd_policy_grid)

    p = sub.add_parser("phase-diagram", parents=[common])
    p.set_defaults(fn=_cmd_phase_diagram)

    p = sub.add_parser("calibrate", parents=[common])
    p.add_argument("--targets", help="target CSV path")
    p.set_defaults(fn=_cmd_calibrate)

    p = sub.add_parser("sensitivity", parents=[common])
    p.add_argument("--variant", choices=scen.SENSITIVITY_CHOICES, required=True)
    p.add_argument("--targets", help="target CSV path")
    p.set_defaults(fn=_cmd_sensitivity)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_EXIT if exc.code else 0
    try:
        cfg = load_config(args.config)
        cfg = with_overrides(
            cfg,
            seed=args.seed,
            profile=args.profile,
            replicates=args.replicates,
            jobs=args.jobs,
            out_dir=args.out,
        )
        return args.fn(cfg, args)
    except Exception as exc:
        print(f"farmscape: {type(exc).__name__}: {exc}", file=sys.stderr)
        return RUNTIME_EXIT


if __name__ == "__main__":
    sys.exit(main())
