"""One-farm simulation runs: landscape, equilibrium ecology, economics.

A FarmSpec resolves every knob for one simulated farm; simulate_once turns a
(spec, seed) pair into a replicate record, and simulate_mean averages a seed
set.  Replicate work is fanned out with pmap, whose outputs are ordered by
task index so results never depend on worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .ecology import EcologyParams, kernel_for, run_to_equilibrium
from .economics import EconParams, EconReport, farm_account, mean_crop_yield, pesticide_intensity
from .landscape import LandscapeParams, ScalingLaw, generate, scaling_laws
from .rng import substream_seed


@dataclass(frozen=True)
class FarmSpec:
    """Fully resolved settings for one simulated farm."""

    farm_size: float
    mean_field_size: float
    hedgerow_share: float
    grassland_share: float
    pi: float
    grid_rows: int = 200
    grid_cols: int = 200
    cell_area: float = 0.01


@dataclass(frozen=True)
class ReplicateResult:
    seed: int
    ne_density: float
    crop_density: float
    report: EconReport


@dataclass(frozen=True)
class RowResult:
    """Replicate-averaged outputs for one scenario row."""

    spec: FarmSpec
    seeds: tuple[int, ...]
    ne_density: float
    crop_density: float
    mean_yield: float
    production: float
    revenue: float
    costs: float
    profit: float
    labor: float
    income: float

    @property
    def replicates(self) -> int:
        return len(self.seeds)


def resolve_farm(
    farm_size: float,
    pi: float | None = None,
    mean_field_size: float | None = None,
    hedgerow_share: float | None = None,
    grassland_share: float | None = None,
    law: ScalingLaw = ScalingLaw(),
    econ: EconParams = EconParams(),
    grid_rows: int = 200,
    grid_cols: int = 200,
    cell_area: float = 0.01,
) -> FarmSpec:
    """FarmSpec with scaling-law and expenditure defaults, any knob pinnable."""
    s, g, h = scaling_laws(farm_size, law)
    return FarmSpec(
        farm_size=farm_size,
        mean_field_size=s if mean_field_size is None else mean_field_size,
        hedgerow_share=h if hedgerow_share is None else hedgerow_share,
        grassland_share=g if grassland_share is None else grassland_share,
        pi=pesticide_intensity(farm_size, econ) if pi is None else pi,
        grid_rows=grid_rows,
        grid_cols=grid_cols,
        cell_area=cell_area,
    )


def simulate_once(
    spec: FarmSpec, seed: int, eco: EcologyParams, econ: EconParams
) -> ReplicateResult:
    """One replicate: generate, equilibrate, account."""
    params = LandscapeParams(
        mean_field_size=spec.mean_field_size,
        hedgerow_share=spec.hedgerow_share,
        grassland_share=spec.grassland_share,
        seed=seed,
        grid_rows=spec.grid_rows,
        grid_cols=spec.grid_cols,
        cell_area=spec.cell_area,
    )
    ls = generate(params)
    field, summary = run_to_equilibrium(ls, spec.pi, eco)
    kernel = kernel_for(eco, spec.cell_area)
    kappa_c_total = eco.kappa_crop * spec.cell_area * kernel.cell_count
    ybar = mean_crop_yield(ls, field, spec.farm_size, spec.pi, econ, kappa_c_total, eco.pi_ref)
    report = farm_account(
        ybar,
        spec.farm_size,
        spec.grassland_share,
        spec.hedgerow_share,
        spec.mean_field_size,
        spec.pi,
        econ,
    )
    return ReplicateResult(
        seed=seed,
        ne_density=summary["mean_density_m2"],
        crop_density=summary["crop_density_m2"],
        report=report,
    )


def replicate_seeds(master_seed: int, count: int, *path) -> tuple[int, ...]:
    return tuple(substream_seed(master_seed, *path, "rep", j) for j in range(count))


def aggregate(spec: FarmSpec, results: list[ReplicateResult]) -> RowResult:
    def mean(values) -> float:
        return float(np.mean(values))

    return RowResult(
        spec=spec,
        seeds=tuple(r.seed for r in results),
        ne_density=mean([r.ne_density for r in results]),
        crop_density=mean([r.crop_density for r in results]),
        mean_yield=mean([r.report.mean_yield for r in results]),
        production=mean([r.report.production for r in results]),
        revenue=mean([r.report.revenue for r in results]),
        costs=mean([r.report.costs for r in results]),
        profit=mean([r.report.profit for r in results]),
        labor=mean([r.report.labor for r in results]),
        income=mean([r.report.income for r in results]),
    )


def _sim_task(task: tuple[FarmSpec, int, EcologyParams, EconParams]) -> ReplicateResult:
    spec, seed, eco, econ = task
    return simulate_once(spec, seed, eco, econ)


def pmap(fn, tasks: list, jobs: int) -> list:
    """Order-preserving parallel map; jobs <= 1 runs inline."""
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    workers = min(jobs, len(tasks), os.cpu_count() or 1)
    chunk = max(1, len(tasks) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=chunk))


def run_rows(
    specs: list[FarmSpec],
    seed_sets: list[tuple[int, ...]],
    eco: EcologyParams,
    econ: EconParams,
    jobs: int = 1,
) -> list[RowResult]:
    """Simulate many (spec, seed set) rows; replicate grain parallelism."""
    tasks = [
        (spec, seed, eco, econ) for spec, seeds in zip(specs, seed_sets) for seed in seeds
    ]
    flat = pmap(_sim_task, tasks, jobs)
    rows: list[RowResult] = []
    cursor = 0
    for spec, seeds in zip(specs, seed_sets):
        rows.append(aggregate(spec, flat[cursor : cursor + len(seeds)]))
        cursor += len(seeds)
    return rows


def simulate_mean(
    spec: FarmSpec,
    master_seed: int,
    replicates: int,
    eco: EcologyParams,
    econ: EconParams,
    jobs: int = 1,
) -> tuple[RowResult, list[ReplicateResult]]:
    seeds = replicate_seeds(master_seed, replicates)
    results = pmap(_sim_task, [(spec, s, eco, econ) for s in seeds], jobs)
    return aggregate(spec, results), results


__all__ = [
    "FarmSpec",
    "ReplicateResult",
    "RowResult",
    "aggregate",
    "pmap",
    "replicate_seeds",
    "resolve_farm",
    "run_rows",
    "simulate_mean",
    "simulate_once",
]
