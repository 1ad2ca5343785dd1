"""Seasonal natural-enemy dynamics on a landscape raster.

Each cell carries an independent population whose coefficients are kernel
sums over its movement neighbourhood: food-limited carrying capacity k_i,
pesticide-induced extra mortality m_i, and overwintering survival s_i from
nearby semi-natural habitat.  A year is one closed-form logistic summer
followed by a multiplicative winter cull; runs iterate a fixed number of
years and report the end-of-summer state.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .landscape import COVER_CROP, Landscape

SN_UNIT_CHOICES = ("cells", "ha")
DENSITY_NORM_CHOICES = ("kernel", "cell")


@dataclass(frozen=True)
class EcologyParams:
    growth_rate: float = 0.01
    kappa_snh: float = 5000.0
    kappa_crop: float = 10000.0
    pi_ref: float = 80.0
    selectivity: float = 0.0
    movement_area: float = 0.2
    sn_ref: float = 0.5
    season_days: float = 180.0
    equilibration_years: int = 10
    # overrides and reporting conventions
    kernel_radius_m: float | None = None
    sn_units: str = "cells"
    density_norm: str = "kernel"

    def __post_init__(self) -> None:
        if self.growth_rate <= 0:
            raise ValueError("growth_rate must be positive")
        if self.kappa_snh <= 0 or self.kappa_crop <= 0:
            raise ValueError("capacities must be positive")
        if self.pi_ref <= 0:
            raise ValueError("pi_ref must be positive")
        if not 0 <= self.selectivity <= 1:
            raise ValueError("selectivity must lie in [0,1]")
        if self.movement_area <= 0:
            raise ValueError("movement_area must be positive")
        if self.sn_ref <= 0:
            raise ValueError("sn_ref must be positive")
        if self.season_days <= 0 or self.equilibration_years < 1:
            raise ValueError("season_days must be positive and years >= 1")
        if self.sn_units not in SN_UNIT_CHOICES:
            raise ValueError(f"sn_units must be one of {SN_UNIT_CHOICES}")
        if self.density_norm not in DENSITY_NORM_CHOICES:
            raise ValueError(f"density_norm must be one of {DENSITY_NORM_CHOICES}")


@dataclass(frozen=True)
class Kernel:
    offsets: tuple[tuple[int, int], ...]
    radius: float

    @property
    def cell_count(self) -> int:
        return len(self.offsets)


@dataclass(frozen=True)
class NEField:
    N: np.ndarray
    k: np.ndarray
    m: np.ndarray
    s: np.ndarray


def response(x: float, y: float) -> float:
    """Saturating response 1/(1 + x/y), decreasing in x; x may be +inf."""
    if y <= 0:
        raise ValueError(f"response reference must be positive, got {y}")
    if x < 0:
        raise ValueError(f"response argument must be non-negative, got {x}")
    if math.isinf(x):
        return 0.0
    return 1.0 / (1.0 + x / y)


def build_kernel(
    movement_area: float, cell_area: float, kernel_radius_m: float | None = None
) -> Kernel:
    """Movement disc as lattice offsets.

    movement_area is the disc area in ha; kernel_radius_m overrides the
    derived radius.  Cells whose centre lies within the radius belong to the
    kernel (boundary inclusive, with a small tolerance so exact-integer radii
    are kept).
    """
    if movement_area <= 0:
        raise ValueError("movement_area must be positive")
    cell_side_m = math.sqrt(cell_area * 1e4)
    if kernel_radius_m is not None:
        radius_m = kernel_radius_m
    else:
        radius_m = math.sqrt(movement_area * 1e4 / math.pi)
    radius = radius_m / cell_side_m
    r2 = radius * radius + 1e-9
    if r2 < 1.0:
        warnings.warn(
            f"movement radius {radius_m:.2f} m is below one cell side; "
            "kernel degenerates to the centre cell",
            stacklevel=2,
        )
        return Kernel(offsets=((0, 0),), radius=radius)
    reach = int(math.floor(radius + 1e-9))
    offsets = tuple(
        (dr, dc)
        for dr in range(-reach, reach + 1)
        for dc in range(-reach, reach + 1)
        if dr * dr + dc * dc <= r2
    )
    return Kernel(offsets=offsets, radius=radius)


def kernel_for(params: EcologyParams, cell_area: float) -> Kernel:
    return build_kernel(params.movement_area, cell_area, params.kernel_radius_m)


def kernel_sum(grid: np.ndarray, kernel: Kernel) -> np.ndarray:
    """Toroidal sum of `grid` over the kernel neighbourhood of every cell."""
    out = np.zeros(grid.shape, dtype=np.float64)
    for dr, dc in kernel.offsets:
        out += np.roll(grid, (dr, dc), axis=(0, 1))
    return out


def carrying_capacity_field(
    ls: Landscape, pi: float, params: EcologyParams, kernel: Kernel | None = None
) -> np.ndarray:
    """k_i: kernel sum of per-cell food capacity, pesticide-discounted on crops."""
    if kernel is None:
        kernel = kernel_for(params, ls.params.cell_area)
    ca = ls.params.cell_area
    local = np.where(
        ls.snh_mask,
        params.kappa_snh * ca,
        params.kappa_crop * ca * response(pi, params.pi_ref),
    )
    return kernel_sum(local, kernel)


def mortality_field(
    ls: Landscape, pi: float, params: EcologyParams, kernel: Kernel | None = None
) -> np.ndarray:
    """m_i: extra mortality from pesticide encountered anywhere in the kernel."""
    if kernel is None:
        kernel = kernel_for(params, ls.params.cell_area)
    mu = (1.0 - params.selectivity) * params.growth_rate
    if math.isinf(pi):
        pi_sum = np.where(kernel_sum((~ls.snh_mask).astype(np.float64), kernel) > 0, np.inf, 0.0)
    else:
        pi_sum = kernel_sum(np.where(ls.snh_mask, 0.0, pi), kernel)
    with np.errstate(invalid="ignore"):
        return np.where(np.isinf(pi_sum), mu, mu * pi_sum / (pi_sum + params.pi_ref))


def snh_in_kernel(ls: Landscape, kernel: Kernel) -> np.ndarray:
    return kernel_sum(ls.snh_mask.astype(np.float64), kernel)


def survival_field(
    ls: Landscape, params: EcologyParams, kernel: Kernel | None = None
) -> np.ndarray:
    """s_i: winter survival saturating in the semi-natural habitat within reach."""
    if kernel is None:
        kernel = kernel_for(params, ls.params.cell_area)
    sn = snh_in_kernel(ls, kernel)
    if params.sn_units == "ha":
        sn = sn * ls.params.cell_area
    return sn / (sn + params.sn_ref)


def winter_survival(
    ls: Landscape, n_summer: np.ndarray, params: EcologyParams, kernel: Kernel | None = None
) -> np.ndarray:
    return survival_field(ls, params, kernel) * n_summer


def summer_growth(n0, k, m, r: float, days: float):
    """Logistic growth with extra mortality, integrated exactly over the season.

    dN/dt = r N (1 - N/k) - m N.  Accepts scalars or arrays; scalar k must be
    positive, array cells with k <= 0 return 0 (the empty-habitat limit).
    """
    n0_a = np.asarray(n0, dtype=np.float64)
    k_a = np.asarray(k, dtype=np.float64)
    m_a = np.asarray(m, dtype=np.float64)
    scalar = n0_a.ndim == 0 and k_a.ndim == 0 and m_a.ndim == 0
    if scalar and k_a <= 0:
        raise ValueError(f"carrying capacity must be positive, got {float(k_a)}")
    if np.any(n0_a < 0):
        raise ValueError("population must be non-negative")

    k_safe = np.where(k_a > 0, k_a, 1.0)
    rp = r - m_a
    kp = k_safe * (1.0 - m_a / r)
    # r' != 0 branch, written to stay stable when kp < 0 (m > r)
    decay = np.exp(-rp * days)
    with np.errstate(divide="ignore", invalid="ignore"):
        general = kp * n0_a / (n0_a + (kp - n0_a) * decay)
        critical = n0_a / (1.0 + r * n0_a * days / k_safe)
    out = np.where(np.abs(rp) * days < 1e-12, critical, general)
    out = np.where(n0_a == 0, 0.0, out)
    out = np.where(k_a > 0, out, 0.0)
    out = np.maximum(out, 0.0)
    return float(out) if scalar else out


def run_to_equilibrium(
    ls: Landscape, pi: float, params: EcologyParams
) -> tuple[NEField, dict]:
    """Iterate seasons for the configured number of years from N = 0.1 k.

    Returns the end-of-summer field of the final year together with a summary
    record; coefficients are static, so cells evolve independently.
    """
    kernel = kernel_for(params, ls.params.cell_area)
    k = carrying_capacity_field(ls, pi, params, kernel)
    m = mortality_field(ls, pi, params, kernel)
    s = survival_field(ls, params, kernel)

    n = 0.1 * k
    for year in range(params.equilibration_years):
        if year > 0:
            n = s * n
        n = summer_growth(n, k, m, params.growth_rate, params.season_days)

    field = NEField(N=n, k=k, m=m, s=s)
    summary = summarize(field, ls, params, kernel)
    return field, summary


def summarize(field: NEField, ls: Landscape, params: EcologyParams, kernel: Kernel) -> dict:
    if params.density_norm == "kernel":
        norm_m2 = kernel.cell_count * ls.params.cell_area * 1e4
    else:
        norm_m2 = ls.params.cell_area * 1e4
    crop = ~ls.snh_mask
    crop_mean = float(field.N[crop].mean()) if crop.any() else 0.0
    return {
        "mean_density_m2": float(field.N.mean()) / norm_m2,
        "crop_density_m2": crop_mean / norm_m2,
        "total_N": float(field.N.sum()),
        "years": params.equilibration_years,
        "seed": ls.params.seed,
    }


def uniform_equilibrium(
    k: float, m: float, s: float, r: float, days: float, years: int, n0: float | None = None
) -> float:
    """Single-cell reduction: the same seasonal map iterated on scalars.

    On a landscape whose cells all share (k, m, s) this equals the lattice
    run exactly, which makes it a cheap independent oracle.
    """
    n = 0.1 * k if n0 is None else n0
    for year in range(years):
        if year > 0:
            n = s * n
        n = summer_growth(n, k, m, r, days)
    return float(n)


def write_ne_csv(field: NEField, ls: Landscape, path: str | Path) -> None:
    rows, cols = field.N.shape
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row", "col", "cover", "field_id", "k", "m", "s", "N_summer"])
        for r in range(rows):
            for c in range(cols):
                writer.writerow(
                    [
                        r,
                        c,
                        int(ls.cover[r, c]),
                        int(ls.field_id[r, c]),
                        f"{field.k[r, c]:.9g}",
                        f"{field.m[r, c]:.9g}",
                        f"{field.s[r, c]:.9g}",
                        f"{field.N[r, c]:.9g}",
                    ]
                )


def write_ne_summary(summary: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")


__all__ = [
    "DENSITY_NORM_CHOICES",
    "EcologyParams",
    "Kernel",
    "NEField",
    "SN_UNIT_CHOICES",
    "build_kernel",
    "carrying_capacity_field",
    "kernel_for",
    "kernel_sum",
    "mortality_field",
    "response",
    "run_to_equilibrium",
    "snh_in_kernel",
    "summarize",
    "summer_growth",
    "survival_field",
    "uniform_equilibrium",
    "winter_survival",
    "write_ne_csv",
    "write_ne_summary",
]
