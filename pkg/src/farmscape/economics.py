"""Farm-level economics: yields under pest pressure, costs, profit, labor, income.

The raster is treated as a representative per-hectare sample of a farm of
size L: mean crop yield and habitat shares transfer to the farm's L hectares.
All monetary values are per year.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ecology import NEField, response
from .landscape import Landscape

YIELD_FORM_CHOICES = ("increasing", "decreasing")

ECON_CSV_COLUMNS = (
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


@dataclass(frozen=True)
class EconParams:
    y0: float = 51.0
    y1: float = 18.0
    l_ref_yield: float = 25.0
    eta: float = 0.3
    pi0: float = 120.0
    l_ref_pesticide: float = 25.0
    cost_op: float = 750.0
    cost_grass: float = 250.0
    cost_hedge: float = 1000.0
    price: float = 15.0
    labor0: float = 0.01
    labor1: float = 0.6
    l_ref_labor: float = 5.0
    s_ref: float = 1.0
    # No published per-ha value exists; the default matches the constant
    # fitted from the bundled survey-style target table.
    subsidy: float = 500.0
    yield_form: str = "increasing"

    def __post_init__(self) -> None:
        positive = (
            self.y0,
            self.l_ref_yield,
            self.pi0,
            self.l_ref_pesticide,
            self.cost_op,
            self.cost_grass,
            self.cost_hedge,
            self.price,
            self.labor0,
            self.labor1,
            self.l_ref_labor,
            self.s_ref,
        )
        if any(v <= 0 for v in positive):
            raise ValueError("economic parameters must be positive")
        if self.y1 < 0:
            raise ValueError("y1 must be non-negative")
        if not 0 <= self.eta <= 1:
            raise ValueError("eta must lie in [0,1]")
        if self.subsidy < 0:
            raise ValueError("subsidy must be non-negative")
        if self.yield_form not in YIELD_FORM_CHOICES:
            raise ValueError(f"yield_form must be one of {YIELD_FORM_CHOICES}")


@dataclass(frozen=True)
class EconReport:
    L: float
    S: float
    g: float
    h: float
    pi: float
    mean_yield: float
    production: float
    revenue: float
    costs: float
    profit: float
    labor: float
    income: float
    L_prod: float
    pesticide_cost: float


def pesticide_intensity(farm_size: float, params: EconParams) -> float:
    """Baseline crop-protection expenditure, rising with farm size toward pi0."""
    if farm_size <= 0:
        raise ValueError(f"farm size must be positive, got {farm_size}")
    return params.pi0 * response(params.l_ref_pesticide, farm_size)


def fertilizer_factor(farm_size: float, params: EconParams) -> float:
    if params.yield_form == "increasing":
        return response(params.l_ref_yield, farm_size)
    return response(farm_size, params.l_ref_yield)


def pest_damage(n, pi: float, kappa_c_total: float, pi_ref: float):
    """Pest pressure in [0,1]: pesticide control minus natural protection, clamped."""
    if kappa_c_total <= 0:
        raise ValueError(f"kappa_c_total must be positive, got {kappa_c_total}")
    return np.clip(response(pi, pi_ref) - np.asarray(n) / kappa_c_total, 0.0, 1.0)


def cell_yield(farm_size: float, damage, params: EconParams):
    """Per-ha yield: fertilizer-boosted potential cut by pest damage."""
    if farm_size <= 0:
        raise ValueError(f"farm size must be positive, got {farm_size}")
    potential = params.y0 + params.y1 * fertilizer_factor(farm_size, params)
    return potential * (1.0 - params.eta * np.asarray(damage))


def labor(l_prod: float, mean_field_size: float, params: EconParams) -> float:
    """Workforce in AWU; per-ha need falls with farm and field size."""
    if l_prod < 0:
        raise ValueError("productive area must be non-negative")
    if mean_field_size <= 0:
        raise ValueError("mean field size must be positive")
    per_ha = params.labor0 + params.labor1 * response(l_prod, params.l_ref_labor) * response(
        mean_field_size, params.s_ref
    )
    return l_prod * per_ha


def farm_account(
    mean_yield: float,
    farm_size: float,
    grassland_share: float,
    hedgerow_share: float,
    mean_field_size: float,
    pi: float,
    params: EconParams,
) -> EconReport:
    """Annual account for one farm given its mean crop yield and land split."""
    if farm_size <= 0:
        raise ValueError("farm size must be positive")
    if grassland_share < 0 or hedgerow_share < 0 or grassland_share + hedgerow_share >= 1:
        raise ValueError("shares must be non-negative with g+h < 1")
    if mean_yield < 0:
        raise ValueError("mean yield must be non-negative")

    l_prod = farm_size * (1.0 - grassland_share - hedgerow_share)
    pesticide_cost = pi * l_prod
    costs = (
        (params.cost_op + pi) * l_prod
        + params.cost_grass * farm_size * grassland_share
        + params.cost_hedge * farm_size * hedgerow_share
    )
    revenue = params.price * l_prod * mean_yield
    profit = revenue - costs + farm_size * params.subsidy
    work = labor(l_prod, mean_field_size, params)
    if work <= 0:
        raise ValueError("labor is zero; income undefined")
    return EconReport(
        L=farm_size,
        S=mean_field_size,
        g=grassland_share,
        h=hedgerow_share,
        pi=pi,
        mean_yield=mean_yield,
        production=l_prod * mean_yield,
        revenue=revenue,
        costs=costs,
        profit=profit,
        labor=work,
        income=profit / work,
        L_prod=l_prod,
        pesticide_cost=pesticide_cost,
    )


def mean_crop_yield(
    ls: Landscape,
    field: NEField,
    farm_size: float,
    pi: float,
    params: EconParams,
    kappa_c_total: float,
    pi_ref: float,
) -> float:
    """Mean per-ha yield over cropland cells under the equilibrium NE field."""
    crop = ~ls.snh_mask
    if not crop.any():
        raise ValueError("landscape has no cropland cells")
    damage = pest_damage(field.N[crop], pi, kappa_c_total, pi_ref)
    return float(np.mean(cell_yield(farm_size, damage, params)))


def write_econ_csv(reports: list[EconReport], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(ECON_CSV_COLUMNS)
        for rep in reports:
            writer.writerow(
                [
                    f"{rep.L:.9g}",
                    f"{rep.S:.9g}",
                    f"{rep.g:.9g}",
                    f"{rep.h:.9g}",
                    f"{rep.pi:.9g}",
                    f"{rep.mean_yield:.9g}",
                    f"{rep.production:.9g}",
                    f"{rep.revenue:.9g}",
                    f"{rep.costs:.9g}",
                    f"{rep.profit:.9g}",
                    f"{rep.labor:.9g}",
                    f"{rep.income:.9g}",
                ]
            )


__all__ = [
    "ECON_CSV_COLUMNS",
    "EconParams",
    "EconReport",
    "YIELD_FORM_CHOICES",
    "cell_yield",
    "farm_account",
    "fertilizer_factor",
    "labor",
    "mean_crop_yield",
    "pest_damage",
    "pesticide_intensity",
    "write_econ_csv",
]
