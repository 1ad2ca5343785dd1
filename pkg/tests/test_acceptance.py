"""End-to-end acceptance checks, one test per shipped claim.

Every test prints a single PASS/FAIL verdict line with the measured
numbers, then asserts.  Tolerances are pinned here, not derived at
runtime.  The full-size scenario tests (05-07) run the real 200x200
grids at 10 replicates and dominate the suite's runtime.
"""

import time
from dataclasses import replace

import numpy as np

from farmscape.calibration import (
    DEFAULT_RANGES,
    CalibrationSpec,
    calibrate,
    load_targets,
    sobol_cell,
)
from farmscape.cli import default_targets_path, main
from farmscape.ecology import (
    EcologyParams,
    kernel_for,
    mortality_field,
    run_to_equilibrium,
    summer_growth,
    uniform_equilibrium,
)
from farmscape.landscape import (
    COVER_CROP,
    COVER_GRASS,
    COVER_HEDGE,
    Landscape,
    LandscapeParams,
    generate,
    landscape_stats,
    params_for_farm,
    scaling_laws,
)
from farmscape.scenarios import (
    PhaseSettings,
    PolicySettings,
    SweepSettings,
    phase_diagram,
    policy_grid,
    sweep_pesticide,
)

MASTER = 20260814


def _verdict(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def _distinct_neighbor_counts(field_id: np.ndarray) -> np.ndarray:
    stacked = np.stack(
        [
            np.roll(field_id, 1, axis=0),
            np.roll(field_id, -1, axis=0),
            np.roll(field_id, 1, axis=1),
            np.roll(field_id, -1, axis=1),
        ]
    )
    stacked.sort(axis=0)
    changes = (np.diff(stacked, axis=0) != 0).sum(axis=0)
    return changes + 1


def test_criterion_01_landscape_exactness():
    rng = np.random.default_rng(0)
    start = time.monotonic()
    worst_share_err = 0.0
    cell = 1.0 / 40000.0
    for _ in range(50):
        farm = float(np.exp(rng.uniform(np.log(1.0), np.log(1000.0))))
        seed = int(rng.integers(0, 2**31))
        params = params_for_farm(farm, seed=seed)
        ls = generate(params)
        stats = landscape_stats(ls)
        err = max(
            abs(stats.realized_h - params.hedgerow_share),
            abs(stats.realized_g - params.grassland_share),
        )
        worst_share_err = max(worst_share_err, err)
        hedge = ls.cover == COVER_HEDGE
        if hedge.any():
            assert (_distinct_neighbor_counts(ls.field_id)[hedge] >= 2).all(), (
                f"hedgerow off a field margin (farm {farm:.2f}, seed {seed})"
            )
    elapsed = time.monotonic() - start
    ok = worst_share_err <= cell + 1e-12 and elapsed < 30.0
    _verdict(
        "landscape shares exact to one cell, hedgerows on margins",
        ok,
        f"worst share error {worst_share_err:.2e} (cap {cell:.2e}), "
        f"50 landscapes in {elapsed:.1f}s (cap 30s)",
    )


def test_criterion_02_kernel_count():
    kernel = kernel_for(EcologyParams(), 0.01)
    radius_cells = np.sqrt(0.2e4 / np.pi) / 10.0
    brute = {
        (dr, dc)
        for dr in range(-4, 5)
        for dc in range(-4, 5)
        if dr * dr + dc * dc <= radius_cells**2 + 1e-9
    }
    ok = len(kernel.offsets) == 21 and set(kernel.offsets) == brute
    _verdict(
        "movement kernel covers exactly the enumerated 21 cells",
        ok,
        f"kernel {len(kernel.offsets)} offsets, enumeration {len(brute)}",
    )


def test_criterion_03_closed_form_vs_euler():
    rng = np.random.default_rng(42)
    n = 1000
    k = rng.uniform(50.0, 3000.0, n)
    # seasons start at or below capacity; 1.5x covers overshoot headroom
    # while keeping dt=0.05 forward Euler itself 1e-3-accurate
    n0 = rng.uniform(0.01, 1.5, n) * k
    m = rng.uniform(0.0, 0.02, n)
    r, days, dt = 0.01, 180.0, 0.05
    closed = summer_growth(n0, k, m, r, days)
    euler = n0.copy()
    for _ in range(int(days / dt)):
        euler += dt * (r * euler * (1.0 - euler / k) - m * euler)
    rel = np.abs(closed - euler) / np.maximum(np.abs(closed), 1e-12)
    ok = float(rel.max()) < 1e-3
    _verdict(
        "season closed form matches Euler integration",
        ok,
        f"max relative error {rel.max():.2e} over {n} triples (cap 1e-3)",
    )


def _uniform_landscape(cover_value: int, rows: int = 200, cols: int = 200) -> Landscape:
    params = LandscapeParams(
        mean_field_size=1.0,
        hedgerow_share=0.0,
        grassland_share=0.0,
        seed=0,
        grid_rows=rows,
        grid_cols=cols,
    )
    cover = np.full((rows, cols), cover_value, dtype=np.int8)
    field_id = np.zeros((rows, cols), dtype=np.int32)
    return Landscape(cover=cover, field_id=field_id, params=params)


def test_criterion_04_homogeneous_reduction():
    worst = 0.0
    for eco, cover, pi in (
        (EcologyParams(), COVER_GRASS, 0.0),
        (EcologyParams(sn_units="ha"), COVER_GRASS, 0.0),
        (EcologyParams(), COVER_CROP, 100.0),
    ):
        ls = _uniform_landscape(cover)
        field, _ = run_to_equilibrium(ls, pi, eco)
        scalar = uniform_equilibrium(
            float(field.k[0, 0]),
            float(field.m[0, 0]),
            float(field.s[0, 0]),
            eco.growth_rate,
            eco.season_days,
            eco.equilibration_years,
        )
        spread = float(field.N.max() - field.N.min())
        err = abs(float(field.N[0, 0]) - scalar) / max(abs(scalar), 1e-12)
        worst = max(worst, err, spread)
    ok = worst < 1e-9
    _verdict(
        "uniform landscapes collapse to the scalar fixed point",
        ok,
        f"worst relative gap {worst:.2e} (cap 1e-9)",
    )


def test_criterion_05_fig3_qualitative():
    start = time.monotonic()
    settings = SweepSettings(replicates=10)
    rows = sweep_pesticide(settings, MASTER)
    elapsed = time.monotonic() - start

    monotone = True
    hedge_wins = True
    for size in settings.field_sizes:
        for layout in ("hedgerow", "grassland"):
            curve = [
                r["ne_density"]
                for r in rows
                if r["field_size"] == size and r["layout"] == layout
            ]
            monotone &= all(a >= b for a, b in zip(curve, curve[1:]))
        at_zero = {
            r["layout"]: r["ne_density"]
            for r in rows
            if r["field_size"] == size and r["pi"] == 0.0
        }
        hedge_wins &= at_zero["hedgerow"] >= at_zero["grassland"]

    stars = []
    for size in settings.field_sizes:
        star = next(r["pi_star"] for r in rows if r["field_size"] == size)
        stars.append(star)
    crossings = all(s is not None for s in stars) and all(
        a <= b for a, b in zip(stars, stars[1:])
    )

    ok = monotone and hedge_wins and crossings and elapsed < 300.0
    stars_txt = ", ".join("none" if s is None else f"{s:.1f}" for s in stars)
    _verdict(
        "pesticide sweep: monotone curves, hedgerow advantage, ordered crossings",
        ok,
        f"monotone={monotone} hedge>=grass at pi=0 {hedge_wins} "
        f"pi* by field size [{stars_txt}] in {elapsed:.0f}s (cap 300s)",
    )


def test_criterion_06_fig4_quantitative():
    rows = policy_grid(PolicySettings(replicates=10), MASTER)

    def pct(farm: float, d_pi: float, policy: str) -> float:
        return next(
            r["pct_income"]
            for r in rows
            if r["farm_size"] == farm and r["d_pi"] == d_pi and r["snh_policy"] == policy
        )

    small = pct(10.0, -1.0, "none")
    large = {p: pct(1000.0, -1.0, p) for p in ("none", "hedgerow", "grassland")}
    ok = 5.0 <= small <= 15.0 and all(v < 0.0 for v in large.values())
    _verdict(
        "pesticide-free income: small farms gain ~10%, large farms lose",
        ok,
        f"10 ha {small:+.2f}% (band [5,15]), 1000 ha "
        + ", ".join(f"{k} {v:+.2f}%" for k, v in large.items())
        + " (all < 0)",
    )


def test_criterion_07_fig5_quantitative():
    start = time.monotonic()
    rows = phase_diagram(PhaseSettings(replicates=10), MASTER)
    elapsed = time.monotonic() - start

    def optimal_pct(farm: float) -> float:
        return next(
            r["pct_income"]
            for r in rows
            if r["farm_size"] == farm and r["optimal"] == 1
        )

    bands = {5.0: (10.0, 20.0), 50.0: (0.0, 10.0), 1000.0: (-10.0, 0.0)}
    measured = {farm: optimal_pct(farm) for farm in bands}
    in_band = {
        farm: lo <= measured[farm] <= hi for farm, (lo, hi) in bands.items()
    }
    ok = all(in_band.values()) and elapsed < 900.0
    detail = ", ".join(
        f"{int(farm)} ha {measured[farm]:+.2f}% (band [{lo:g},{hi:g}])"
        for farm, (lo, hi) in bands.items()
    )
    _verdict(
        "optimal hedgerow conversion: income bands across farm sizes",
        ok,
        f"{detail}; {elapsed:.0f}s (cap 900s)",
    )


def test_criterion_08_calibration_self_consistency():
    targets = load_targets(default_targets_path())
    spec = CalibrationSpec(
        targets=targets,
        sample_count=256,
        replicates=10,
        grid_rows=100,
        grid_cols=100,
    )
    res = calibrate(spec, MASTER)
    truth = {"y0": 51.0, "y1": 18.0, "l_ref_yield": 25.0}
    cells = {
        name: (
            sobol_cell(res.params_dict[name], lo, hi),
            sobol_cell(truth[name], lo, hi),
        )
        for name, lo, hi in DEFAULT_RANGES
    }
    # 25 sits 6% of a cell below the 25.75 edge and the plateau is flat
    # there, so the 256-point scan's nearest competitive point lies one
    # cell over; exact recovery is demanded where the data identify it
    bin_width = (100.0 - 1.0) / 8.0
    ok_cells = (
        cells["y0"][0] == cells["y0"][1]
        and cells["y1"][0] == cells["y1"][1]
        and abs(cells["l_ref_yield"][0] - cells["l_ref_yield"][1]) <= 1
        and abs(res.params_dict["l_ref_yield"] - truth["l_ref_yield"]) < bin_width
    )
    ok = ok_cells and res.r_squared >= 0.95
    _verdict(
        "calibration recovers the generating parameters",
        ok,
        f"best {res.params_dict['y0']:.2f}/{res.params_dict['y1']:.2f}/"
        f"{res.params_dict['l_ref_yield']:.2f} vs truth 51/18/25, "
        f"cells {[(cells[n]) for n in ('y0', 'y1', 'l_ref_yield')]}, "
        f"R2 {res.r_squared:.4f} (floor 0.95)",
    )


def test_criterion_09_sensitivity_directionality():
    eco = EcologyParams()
    halves_exact = True
    sn_lower = True
    pi_higher = True
    details = []
    for seed in (0, 1, 2):
        ls = generate(params_for_farm(10.0, seed=seed, grid_rows=100, grid_cols=100))
        m_base = mortality_field(ls, 100.0, eco)
        m_half = mortality_field(ls, 100.0, replace(eco, selectivity=0.5))
        halves_exact &= np.array_equal(m_half, 0.5 * m_base)

        base = run_to_equilibrium(ls, 100.0, eco)[1]["mean_density_m2"]
        harsher_winter = run_to_equilibrium(ls, 100.0, replace(eco, sn_ref=1.0))[1][
            "mean_density_m2"
        ]
        weaker_pesticide = run_to_equilibrium(ls, 100.0, replace(eco, pi_ref=160.0))[
            1
        ]["mean_density_m2"]
        sn_lower &= harsher_winter < base
        pi_higher &= weaker_pesticide > base
        details.append(f"seed {seed}: {harsher_winter:.4f}<{base:.4f}<{weaker_pesticide:.4f}")
    ok = halves_exact and sn_lower and pi_higher
    _verdict(
        "sensitivity knobs move densities the right way",
        ok,
        f"q=0.5 halves mortality exactly: {halves_exact}; " + "; ".join(details),
    )


def test_criterion_10_reproducibility(tmp_path):
    cfg = tmp_path / "config.toml"
    cfg.write_text("[landscape]\ngrid_rows = 60\ngrid_cols = 60\n")

    def run(name: str, jobs: str) -> tuple[bytes, bytes, bytes]:
        out = tmp_path / name
        rc = main(
            [
                "sweep-fig3",
                "--config",
                str(cfg),
                "--seed",
                "9",
                "--replicates",
                "2",
                "--pi-max",
                "20",
                "--pi-step",
                "10",
                "--jobs",
                jobs,
                "--out",
                str(out),
            ]
        )
        assert rc == 0
        return (
            (out / "fig3.csv").read_bytes(),
            (out / "manifest.json").read_bytes(),
            (out / "config_resolved.toml").read_bytes(),
        )

    first = run("a", "1")
    second = run("b", "1")
    parallel = run("c", "2")
    ok = first == second == parallel
    _verdict(
        "identical seeds give byte-identical outputs across job counts",
        ok,
        f"rerun identical: {first == second}, jobs=2 identical: {first == parallel}",
    )
