"""Fit yield parameters to farm-size-binned survey targets.

The free parameters (y0, y1, l_ref_yield) are sampled with a Sobol
sequence over box ranges and scored by weighted relative least squares
against per-bin observations.  Exogenous curves (grassland share, crop
protection expenditure, labor coefficients, constant costs and subsidy)
are fitted directly by grid search on their closed forms.

Natural-enemy dynamics do not depend on the yield parameters, so the
replicate simulations are shared across Sobol points and only the
economic account is recomputed, arithmetically, from the cached mean
pest damage.  Scanning an expenditure-curve parameter disables the
sharing.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy.stats import qmc

from .ecology import EcologyParams, kernel_for, run_to_equilibrium
from .economics import (
    EconParams,
    cell_yield,
    farm_account,
    pest_damage,
    pesticide_intensity,
)
from .landscape import LandscapeParams, generate, scaling_laws
from .rng import substream_seed
from .runner import pmap

TARGET_FIELD_CHOICES = (
    "yield",
    "output",
    "profit",
    "income",
    "grassland_share",
    "cpe",
    "labor",
    "costs",
    "subsidy",
)
DEFAULT_LOSS_FIELDS = ("yield", "output", "profit", "income")
DEFAULT_RANGES = (("y0", 30.0, 70.0), ("y1", 0.0, 40.0), ("l_ref_yield", 1.0, 100.0))
# the only calibratable parameters the ecology runs can see
DAMAGE_COUPLED_FIELDS = ("pi0", "l_ref_pesticide")
DEFAULT_BINS = (5.0, 10.0, 25.0, 50.0, 100.0, 250.0)
TARGET_CSV_COLUMNS = ("farm_size_ha", "field", "value", "stddev", "weight")
REPORT_CSV_COLUMNS = ("idx", "y0", "y1", "Lref_y", "sse")
FIT_CSV_COLUMNS = ("farm_size", "field", "observed", "stddev", "weight", "simulated")

# scipy ships direction numbers far beyond this; the cap keeps the
# sampled space within the ranges the rest of the module understands.
MAX_SOBOL_DIM = 8


class CalibrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class TargetRow:
    farm_size: float
    field: str
    value: float
    stddev: float
    weight: float

    def __post_init__(self) -> None:
        if self.field not in TARGET_FIELD_CHOICES:
            raise ValueError(f"unknown target field {self.field!r}")
        if self.farm_size <= 0:
            raise ValueError("farm size bins must be positive")
        if self.stddev < 0 or self.weight < 0:
            raise ValueError("stddev and weight must be non-negative")


@dataclass(frozen=True)
class CalibrationSpec:
    targets: tuple[TargetRow, ...]
    ranges: tuple[tuple[str, float, float], ...] = DEFAULT_RANGES
    sample_count: int = 4096
    replicates: int = 100
    farm_size_bins: tuple[float, ...] = DEFAULT_BINS
    loss_fields: tuple[str, ...] = DEFAULT_LOSS_FIELDS
    grid_rows: int = 200
    grid_cols: int = 200
    cell_area: float = 0.01

    def __post_init__(self) -> None:
        if not self.ranges:
            raise ValueError("ranges must be non-empty")
        for name, lo, hi in self.ranges:
            if not lo < hi:
                raise ValueError(f"range for {name} must satisfy lo < hi")
        names = [name for name, _, _ in self.ranges]
        if len(set(names)) != len(names):
            raise ValueError("range names must be unique")
        if self.sample_count < 1:
            raise ValueError("sample_count must be at least 1")
        if self.replicates < 1:
            raise ValueError("replicates must be at least 1")
        if any(b <= a for a, b in zip(self.farm_size_bins, self.farm_size_bins[1:])):
            raise ValueError("farm_size_bins must be strictly increasing")
        unknown = set(self.loss_fields) - set(TARGET_FIELD_CHOICES)
        if unknown:
            raise ValueError(f"unknown loss fields {sorted(unknown)}")
        have = {(row.farm_size, row.field) for row in self.targets}
        for size in self.farm_size_bins:
            for field in self.loss_fields:
                if (size, field) not in have:
                    raise ValueError(f"target table missing {field!r} for bin {size}")

    def observation(self, farm_size: float, field: str) -> TargetRow:
        for row in self.targets:
            if row.farm_size == farm_size and row.field == field:
                return row
        raise KeyError((farm_size, field))


@dataclass(frozen=True)
class CalibrationResult:
    best_params: tuple[tuple[str, float], ...]
    best_index: int
    best_loss: float
    r_squared: float
    adjusted_r_squared: float
    evaluated_points: int
    audit: tuple[tuple, ...]

    def __post_init__(self) -> None:
        if not self.adjusted_r_squared <= self.r_squared <= 1.0:
            raise ValueError("expected adjusted R² ≤ R² ≤ 1")

    @property
    def params_dict(self) -> dict[str, float]:
        return dict(self.best_params)


def load_targets(path: str | Path) -> tuple[TargetRow, ...]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != TARGET_CSV_COLUMNS:
            raise ValueError(
                f"target CSV must have columns {','.join(TARGET_CSV_COLUMNS)}"
            )
        rows = tuple(
            TargetRow(
                farm_size=float(rec["farm_size_ha"]),
                field=rec["field"],
                value=float(rec["value"]),
                stddev=float(rec["stddev"]),
                weight=float(rec["weight"]),
            )
            for rec in reader
        )
    if not rows:
        raise ValueError("target CSV is empty")
    return rows


def sobol_sample(dim: int, n: int) -> np.ndarray:
    """First n points of the unscrambled Sobol sequence in [0,1)^dim."""
    if not 1 <= dim <= MAX_SOBOL_DIM:
        raise ValueError(f"dim must be in [1, {MAX_SOBOL_DIM}]")
    if n < 1:
        raise ValueError("n must be at least 1")
    with warnings.catch_warnings():
        # balance warning for n not a power of two is irrelevant here
        warnings.simplefilter("ignore", UserWarning)
        return qmc.Sobol(d=dim, scramble=False).random(n)


def map_points(
    points: np.ndarray, ranges: tuple[tuple[str, float, float], ...]
) -> np.ndarray:
    lo = np.array([r[1] for r in ranges])
    hi = np.array([r[2] for r in ranges])
    return lo + points * (hi - lo)


def replicate_seed(master_seed: int, point_index: int, replicate: int) -> int:
    return substream_seed(master_seed, "calib", point_index, "rep", replicate)


def _mean_damage(
    farm_size: float,
    seed: int,
    eco: EcologyParams,
    econ: EconParams,
    grid_rows: int,
    grid_cols: int,
    cell_area: float,
) -> float:
    s, g, h = scaling_laws(farm_size)
    params = LandscapeParams(
        mean_field_size=s,
        hedgerow_share=h,
        grassland_share=g,
        seed=seed,
        grid_rows=grid_rows,
        grid_cols=grid_cols,
        cell_area=cell_area,
    )
    ls = generate(params)
    pi = pesticide_intensity(farm_size, econ)
    field, _ = run_to_equilibrium(ls, pi, eco)
    kernel = kernel_for(eco, cell_area)
    kappa_c_total = eco.kappa_crop * cell_area * kernel.cell_count
    crop = ~ls.snh_mask
    if not crop.any():
        raise CalibrationError("landscape has no cropland cells")
    return float(np.mean(pest_damage(field.N[crop], pi, kappa_c_total, eco.pi_ref)))


def _damage_task(task) -> tuple[str, float | str]:
    farm_size, seed, eco, econ, rows, cols, area = task
    try:
        return ("ok", _mean_damage(farm_size, seed, eco, econ, rows, cols, area))
    except Exception as exc:  # poisoned point, not a crashed sweep
        return ("err", f"{type(exc).__name__}: {exc}")


def bin_account(
    farm_size: float,
    mean_pest_damage: float,
    econ: EconParams,
):
    """Economic account for one bin from its replicate-mean pest damage."""
    s, g, h = scaling_laws(farm_size)
    pi = pesticide_intensity(farm_size, econ)
    ybar = float(cell_yield(farm_size, mean_pest_damage, econ))
    return farm_account(ybar, farm_size, g, h, s, pi, econ)


def simulated_fields(
    farm_size: float, mean_pest_damage: float, econ: EconParams
) -> dict[str, float]:
    rep = bin_account(farm_size, mean_pest_damage, econ)
    return {
        "yield": rep.mean_yield,
        "output": rep.revenue / farm_size,
        "profit": rep.profit / farm_size,
        "income": rep.income,
        "grassland_share": rep.g,
        "cpe": rep.pi,
        "labor": rep.labor,
        "costs": econ.cost_op,
        "subsidy": econ.subsidy,
    }


def loss_from_damage(
    params: dict[str, float],
    spec: CalibrationSpec,
    damage_by_bin: dict[float, float],
    econ_base: EconParams,
) -> float:
    """Weighted relative SSE over the spec's loss fields.

    Each residual is normalized by the observed value so that fields of
    very different magnitude contribute comparably.
    """
    econ = replace(econ_base, **params)
    sse = 0.0
    for farm_size in spec.farm_size_bins:
        sim = simulated_fields(farm_size, damage_by_bin[farm_size], econ)
        for field in spec.loss_fields:
            obs = spec.observation(farm_size, field)
            if obs.value == 0:
                raise CalibrationError(
                    f"zero-valued target {field!r} at bin {farm_size} "
                    "cannot be relatively normalized"
                )
            rel = (sim[field] - obs.value) / abs(obs.value)
            sse += obs.weight * rel * rel
    return sse


def loss(
    params: dict[str, float],
    spec: CalibrationSpec,
    master_seed: int,
    eco: EcologyParams = EcologyParams(),
    econ_base: EconParams = EconParams(),
    point_index: int = 0,
    jobs: int = 1,
) -> float:
    """SSE at one parameter point, running its own replicate simulations."""
    for (name, lo, hi) in spec.ranges:
        if name in params and not lo <= params[name] <= hi:
            raise ValueError(f"parameter {name} outside range [{lo}, {hi}]")
    tasks = [
        (
            size,
            replicate_seed(master_seed, point_index, k),
            eco,
            econ_base,
            spec.grid_rows,
            spec.grid_cols,
            spec.cell_area,
        )
        for size in spec.farm_size_bins
        for k in range(spec.replicates)
    ]
    outcomes = pmap(_damage_task, tasks, jobs)
    damage_by_bin: dict[float, float] = {}
    for i, size in enumerate(spec.farm_size_bins):
        chunk = outcomes[i * spec.replicates : (i + 1) * spec.replicates]
        if any(status == "err" for status, _ in chunk):
            return math.inf
        damage_by_bin[size] = float(np.mean([v for _, v in chunk]))
    return loss_from_damage(params, spec, damage_by_bin, econ_base)


def _pooled_r_squared(
    spec: CalibrationSpec,
    damage_by_bin: dict[float, float],
    econ: EconParams,
) -> tuple[float, float, int]:
    """R² over pooled observations, each field centered on its own mean.

    Observations are scaled by the per-field mean absolute value before
    pooling so the statistic is not dominated by the largest field.
    """
    obs_by_field: dict[str, list[float]] = {f: [] for f in spec.loss_fields}
    sim_by_field: dict[str, list[float]] = {f: [] for f in spec.loss_fields}
    w_by_field: dict[str, list[float]] = {f: [] for f in spec.loss_fields}
    for farm_size in spec.farm_size_bins:
        sim = simulated_fields(farm_size, damage_by_bin[farm_size], econ)
        for field in spec.loss_fields:
            row = spec.observation(farm_size, field)
            obs_by_field[field].append(row.value)
            sim_by_field[field].append(sim[field])
            w_by_field[field].append(row.weight)
    ss_res = 0.0
    ss_tot = 0.0
    count = 0
    for field in spec.loss_fields:
        obs = np.array(obs_by_field[field])
        sim = np.array(sim_by_field[field])
        w = np.array(w_by_field[field])
        scale = float(np.mean(np.abs(obs)))
        if scale == 0:
            raise CalibrationError(f"target field {field!r} has zero scale")
        ss_res += float(np.sum(w * ((sim - obs) / scale) ** 2))
        ss_tot += float(np.sum(w * ((obs - obs.mean()) / scale) ** 2))
        count += len(obs)
    if ss_tot == 0:
        raise CalibrationError("targets have no variance; R² undefined")
    r2 = 1.0 - ss_res / ss_tot
    p = len(spec.ranges)
    if count <= p + 1:
        raise CalibrationError("too few observations for adjusted R²")
    adj = 1.0 - (1.0 - r2) * (count - 1) / (count - p - 1)
    return r2, adj, count


def _shared_sims(spec: CalibrationSpec) -> bool:
    """True when every Sobol point would run identical simulations.

    Pest damage sees the calibrated parameters only through the
    crop-protection expenditure curve; unless one of its parameters is
    being scanned, the replicate simulations cannot differ between
    points and are run once.
    """
    names = {name for name, _, _ in spec.ranges}
    return not names & set(DAMAGE_COUPLED_FIELDS)


def calibrate(
    spec: CalibrationSpec,
    master_seed: int,
    eco: EcologyParams = EcologyParams(),
    econ_base: EconParams = EconParams(),
    jobs: int = 1,
) -> CalibrationResult:
    """Score every mapped Sobol point and return the argmin with fit stats."""
    names = [name for name, _, _ in spec.ranges]
    points = map_points(sobol_sample(len(names), spec.sample_count), spec.ranges)

    shared = _shared_sims(spec)
    sim_points = 1 if shared else spec.sample_count
    tasks = []
    for j in range(sim_points):
        for size in spec.farm_size_bins:
            for k in range(spec.replicates):
                tasks.append(
                    (
                        size,
                        replicate_seed(master_seed, j, k),
                        eco,
                        econ_base,
                        spec.grid_rows,
                        spec.grid_cols,
                        spec.cell_area,
                    )
                )
    outcomes = pmap(_damage_task, tasks, jobs)

    audit: list[tuple] = []
    best_idx = -1
    best_sse = math.inf
    best_damage: dict[float, float] = {}
    per_point = len(spec.farm_size_bins) * spec.replicates
    for j in range(spec.sample_count):
        src = 0 if shared else j
        chunk = outcomes[src * per_point : (src + 1) * per_point]
        params = {name: float(points[j, i]) for i, name in enumerate(names)}
        errors = [msg for status, msg in chunk if status == "err"]
        if errors:
            sse = math.inf
            audit.append((j, *[params[n] for n in names], sse, errors[0]))
        else:
            damage_by_bin = {}
            for i, size in enumerate(spec.farm_size_bins):
                vals = chunk[i * spec.replicates : (i + 1) * spec.replicates]
                damage_by_bin[size] = float(np.mean([v for _, v in vals]))
            try:
                sse = loss_from_damage(params, spec, damage_by_bin, econ_base)
                audit.append((j, *[params[n] for n in names], sse))
            except ValueError as exc:
                # a mapped point that the account rejects poisons itself,
                # it does not abort the scan
                sse = math.inf
                audit.append((j, *[params[n] for n in names], sse, str(exc)))
        if sse < best_sse:
            best_idx, best_sse, best_damage = j, sse, damage_by_bin
    if best_idx < 0:
        raise CalibrationError("all Sobol points poisoned; calibration failed")

    best_params = {name: float(points[best_idx, i]) for i, name in enumerate(names)}
    econ_best = replace(econ_base, **best_params)
    r2, adj, _ = _pooled_r_squared(spec, best_damage, econ_best)
    return CalibrationResult(
        best_params=tuple(best_params.items()),
        best_index=best_idx,
        best_loss=best_sse,
        r_squared=r2,
        adjusted_r_squared=adj,
        evaluated_points=spec.sample_count,
        audit=tuple(audit),
    )


def best_damage_by_bin(
    spec: CalibrationSpec,
    result: CalibrationResult,
    master_seed: int,
    eco: EcologyParams = EcologyParams(),
    econ_base: EconParams = EconParams(),
    jobs: int = 1,
) -> dict[float, float]:
    """Re-run the winning point's replicates (bit-identical seeds)."""
    point = 0 if _shared_sims(spec) else result.best_index
    tasks = [
        (
            size,
            replicate_seed(master_seed, point, k),
            eco,
            econ_base,
            spec.grid_rows,
            spec.grid_cols,
            spec.cell_area,
        )
        for size in spec.farm_size_bins
        for k in range(spec.replicates)
    ]
    outcomes = pmap(_damage_task, tasks, jobs)
    damage: dict[float, float] = {}
    for i, size in enumerate(spec.farm_size_bins):
        chunk = outcomes[i * spec.replicates : (i + 1) * spec.replicates]
        bad = [msg for status, msg in chunk if status == "err"]
        if bad:
            raise CalibrationError(f"replicate failed at bin {size}: {bad[0]}")
        damage[size] = float(np.mean([v for _, v in chunk]))
    return damage


def sobol_cell(value: float, lo: float, hi: float, bins: int = 8) -> int:
    """Index of the equal-width cell containing value; top edge closed."""
    idx = int((value - lo) / (hi - lo) * bins)
    return min(max(idx, 0), bins - 1)


def fit_exogenous(
    targets: tuple[TargetRow, ...],
) -> tuple[dict[str, float], dict[str, float]]:
    """Grid-search least squares for the measured (non-simulated) curves."""

    def series(field: str) -> tuple[np.ndarray, np.ndarray]:
        rows = sorted(
            (r for r in targets if r.field == field), key=lambda r: r.farm_size
        )
        if len(rows) < 3:
            raise ValueError(
                f"underdetermined: field {field!r} needs at least 3 bins, "
                f"got {len(rows)}"
            )
        sizes = np.array([r.farm_size for r in rows])
        values = np.array([r.value for r in rows])
        return sizes, values

    fitted: dict[str, float] = {}
    sses: dict[str, float] = {}

    sizes, values = series("grassland_share")
    g0_grid = np.arange(0.01, 0.5001, 0.005)
    b_grid = np.arange(-1.0, 0.0001, 0.01)
    pred = g0_grid[:, None, None] * sizes[None, None, :] ** b_grid[None, :, None]
    sse = ((pred - values) ** 2).sum(axis=2)
    i, j = np.unravel_index(int(np.argmin(sse)), sse.shape)
    fitted["g0"], fitted["g_exp"] = float(g0_grid[i]), float(b_grid[j])
    sses["grassland_share"] = float(sse[i, j])

    sizes, values = series("cpe")
    pi0_grid = np.arange(10.0, 300.01, 5.0)
    lref_grid = np.arange(1.0, 100.01, 1.0)
    pred = pi0_grid[:, None, None] / (1.0 + lref_grid[None, :, None] / sizes)
    sse = ((pred - values) ** 2).sum(axis=2)
    i, j = np.unravel_index(int(np.argmin(sse)), sse.shape)
    fitted["pi0"] = float(pi0_grid[i])
    fitted["l_ref_pesticide"] = float(lref_grid[j])
    sses["cpe"] = float(sse[i, j])

    sizes, values = series("labor")
    laws = [scaling_laws(float(L)) for L in sizes]
    l_prod = np.array([L * (1.0 - g - h) for L, (s, g, h) in zip(sizes, laws)])
    f_lp = 1.0 / (1.0 + l_prod / 5.0)
    f_s = np.array([1.0 / (1.0 + s / 1.0) for s, _, _ in laws])
    l0_grid = np.arange(0.002, 0.0501, 0.002)
    l1_grid = np.arange(0.05, 1.0001, 0.05)
    pred = l_prod * (
        l0_grid[:, None, None] + l1_grid[None, :, None] * (f_lp * f_s)[None, None, :]
    )
    sse = ((pred - values) ** 2).sum(axis=2)
    i, j = np.unravel_index(int(np.argmin(sse)), sse.shape)
    fitted["labor0"], fitted["labor1"] = float(l0_grid[i]), float(l1_grid[j])
    sses["labor"] = float(sse[i, j])

    for field, key in (("costs", "cost_op"), ("subsidy", "subsidy")):
        _, values = series(field)
        fitted[key] = float(values.mean())
        sses[field] = float(((values - values.mean()) ** 2).sum())

    return fitted, sses


def write_report(
    result: CalibrationResult, csv_path: str | Path, summary_path: str | Path
) -> None:
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPORT_CSV_COLUMNS)
        for entry in result.audit:
            idx, y0, y1, lref, sse = entry[:5]
            writer.writerow(
                [idx, f"{y0:.9g}", f"{y1:.9g}", f"{lref:.9g}", f"{sse:.9g}"]
            )
    summary = {
        "best_params": dict(result.best_params),
        "best_index": result.best_index,
        "best_loss": result.best_loss,
        "r_squared": result.r_squared,
        "adjusted_r_squared": result.adjusted_r_squared,
        "evaluated_points": result.evaluated_points,
        "r_squared_centering": "per-field mean, per-field mean-|obs| scaling",
    }
    with open(summary_path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_fit(
    spec: CalibrationSpec,
    damage_by_bin: dict[float, float],
    econ: EconParams,
    path: str | Path,
) -> None:
    """Observed-vs-simulated table for every target field, for plotting."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(FIT_CSV_COLUMNS)
        for target in sorted(spec.targets, key=lambda r: (r.field, r.farm_size)):
            if target.farm_size in damage_by_bin:
                sim = simulated_fields(
                    target.farm_size, damage_by_bin[target.farm_size], econ
                )[target.field]
            else:
                continue
            writer.writerow(
                [
                    f"{target.farm_size:.9g}",
                    target.field,
                    f"{target.value:.9g}",
                    f"{target.stddev:.9g}",
                    f"{target.weight:.9g}",
                    f"{sim:.9g}",
                ]
            )
