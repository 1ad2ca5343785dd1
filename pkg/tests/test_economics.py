import numpy as np
import pytest
from hypothesis import given, strategies as st

from farmscape.economics import (
    EconParams,
    cell_yield,
    farm_account,
    fertilizer_factor,
    labor,
    pest_damage,
    pesticide_intensity,
    write_econ_csv,
)


def test_pesticide_intensity_pins():
    econ = EconParams()
    assert pesticide_intensity(50.0, econ) == pytest.approx(80.0, rel=1e-12)
    assert pesticide_intensity(25.0, econ) == pytest.approx(60.0, rel=1e-12)
    # saturates at the reference expenditure for very large farms
    assert pesticide_intensity(1e9, econ) == pytest.approx(120.0, rel=1e-6)


def test_fertilizer_factor_monotonic():
    econ = EconParams()
    values = [fertilizer_factor(L, econ) for L in (5.0, 25.0, 100.0, 1000.0)]
    assert values == sorted(values)
    decreasing = EconParams(yield_form="decreasing")
    flipped = [fertilizer_factor(L, decreasing) for L in (5.0, 25.0, 100.0, 1000.0)]
    assert flipped == sorted(flipped, reverse=True)


def test_pest_damage_clamps():
    assert pest_damage(np.array([0.0]), 0.0, 2100.0, 80.0)[0] == 1.0
    assert pest_damage(np.array([4000.0]), 0.0, 2100.0, 80.0)[0] == 0.0
    assert pest_damage(np.array([1050.0]), 80.0, 2100.0, 80.0)[0] == pytest.approx(0.0)
    mid = pest_damage(np.array([525.0]), 0.0, 2100.0, 80.0)[0]
    assert mid == pytest.approx(0.75)


def test_farm_account_frozen_example():
    econ = EconParams(subsidy=350.0)
    rep = farm_account(60.0, 100.0, 0.04, 0.015, 2.52, 96.0, econ)
    assert rep.L_prod == pytest.approx(94.5, rel=1e-12)
    assert rep.revenue == pytest.approx(85050.0, rel=1e-12)
    assert rep.costs == pytest.approx(82447.0, rel=1e-12)
    assert rep.profit == pytest.approx(37603.0, rel=1e-12)
    assert rep.income == pytest.approx(rep.profit / rep.labor, rel=1e-12)
    assert rep.pesticide_cost == pytest.approx(96.0 * 94.5, rel=1e-12)


def test_labor_closed_form():
    econ = EconParams()
    l_prod, s = 94.5, 2.52
    expected = l_prod * (
        0.01 + 0.6 * (1.0 / (1.0 + l_prod / 5.0)) * (1.0 / (1.0 + s / 1.0))
    )
    assert labor(l_prod, s, econ) == pytest.approx(expected, rel=1e-12)


def test_cell_yield_forms():
    econ = EconParams()
    # damage-free yield at the fertilizer plateau
    assert cell_yield(50.0, 0.0, econ) == pytest.approx(51.0 + 18.0 * (2.0 / 3.0))
    assert cell_yield(50.0, 1.0, econ) == pytest.approx(
        (51.0 + 18.0 * (2.0 / 3.0)) * 0.7
    )


def test_farm_account_rejects_bad_shares():
    econ = EconParams()
    with pytest.raises(ValueError):
        farm_account(60.0, 100.0, 0.6, 0.4, 2.0, 0.0, econ)
    with pytest.raises(ValueError):
        farm_account(-1.0, 100.0, 0.0, 0.0, 2.0, 0.0, econ)


def test_econ_csv_round_trip(tmp_path):
    econ = EconParams()
    rep = farm_account(55.0, 50.0, 0.05, 0.02, 1.9, 80.0, econ)
    path = tmp_path / "econ.csv"
    write_econ_csv([rep], path)
    header, line = path.read_text().strip().splitlines()
    assert header.split(",")[0] == "L"
    assert float(line.split(",")[0]) == 50.0


@given(
    y_lo=st.floats(min_value=1.0, max_value=80.0),
    bump=st.floats(min_value=0.1, max_value=20.0),
)
def test_profit_increases_with_yield(y_lo, bump):
    econ = EconParams()
    lo = farm_account(y_lo, 50.0, 0.05, 0.02, 1.9, 80.0, econ)
    hi = farm_account(y_lo + bump, 50.0, 0.05, 0.02, 1.9, 80.0, econ)
    assert hi.profit > lo.profit
    assert hi.labor == lo.labor


@given(
    n=st.floats(min_value=0.0, max_value=5000.0),
    pi=st.floats(min_value=0.0, max_value=500.0),
)
def test_pest_damage_in_unit_interval(n, pi):
    d = float(pest_damage(np.array([n]), pi, 2100.0, 80.0)[0])
    assert 0.0 <= d <= 1.0
