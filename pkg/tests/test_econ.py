"""Connection economics: published constants, worked figures, invariants."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from carbonflow.econ import (PROFIT_EPS, capital_cost, draw_capture_cost,
                             evaluate_connection, revenue_rate, row_profits,
                             transport_op_per_tonne)
from carbonflow.routes import Route
from carbonflow.types import (CAPTURE_COST_RANGES, CostMultipliers,
                              DemandCategory, EconomicParams, Mode)
from helpers import sink, source


def route(mode=Mode.PIPELINE, a=5.0, b=100.0, c=5.0, avail=0):
    return Route("S1", "D1", mode, "in", "out", a, b, c, available_year=avail)


def test_published_constants_round_trip():
    p = EconomicParams()
    assert (p.revenue_storage, p.revenue_storage_dac) == (85.0, 180.0)
    assert (p.revenue_utilization, p.revenue_utilization_dac) == (60.0, 130.0)
    assert p.rate_pipeline == 0.0161
    assert p.rate_rail == 0.0708
    assert p.rate_water == 0.0644
    assert p.rate_truck == 0.1770
    assert p.capex_pipeline_per_mile == 784_198.0
    assert p.capex_rail_per_mile == 2_000_000.0
    assert p.capex_water_terminal_per_tonne == 4_585.1
    assert p.terminal_buffer_days == 7.0
    assert p.water_terminal_count == 2
    assert p.storage_cost_default == 10.0
    assert p.share_to_supply == 0.75
    assert p.credit_years == 12
    assert p.mandated_years == 12
    assert p.multipliers == CostMultipliers(1.0, 1.0, 1.0, 1.0, 1.0)


def test_capture_cost_ranges_round_trip():
    want = {
        "DAC": (134.0, 342.0),
        "BECCS": (55.0, 60.0),
        "Cement": (60.0, 120.0),
        "Chemicals": (15.0, 25.0),
        "Hydrogen": (50.0, 80.0),
        "Iron & Steel": (40.0, 100.0),
        "Metals": (40.0, 100.0),
        "Minerals": (15.0, 25.0),
        "Other": (15.0, 25.0),
        "Petro & NG Systems": (15.0, 25.0),
        "Petrochemicals": (15.0, 25.0),
        "Powerplant": (50.0, 100.0),
        "Pulp & Paper": (40.0, 100.0),
        "Refinery": (15.0, 25.0),
        "Waste": (40.0, 100.0),
    }
    assert CAPTURE_COST_RANGES == want


def test_worked_example_chemicals_over_pipeline():
    s = source(cost=20.0, fraction=1.0, tonnes=1_000_000.0)
    d = sink(cost=10.0)
    ev = evaluate_connection(s, d, route(), 2025, EconomicParams())
    assert transport_op_per_tonne(route(), EconomicParams()) == \
        pytest.approx(1.771, rel=1e-12)
    assert ev.capex_total == pytest.approx(7_841_980.0, rel=1e-12)
    assert ev.revenue_total == pytest.approx(1_020_000_000.0, rel=1e-12)
    assert ev.supply_revenue == pytest.approx(765_000_000.0, rel=1e-12)
    assert ev.demand_revenue == pytest.approx(255_000_000.0, rel=1e-12)
    assert ev.supply_profit == pytest.approx(495_906_020.0, rel=1e-6)
    assert ev.demand_profit == pytest.approx(135_000_000.0, rel=1e-6)
    assert ev.profit_per_tonne == pytest.approx(52.58, abs=0.005)
    assert ev.profitable
    assert ev.lifetime_tonnes == 12_000_000.0


def test_worked_example_transport_rates():
    p = EconomicParams()
    rail = route(Mode.RAIL, a=0.0, b=215.0, c=0.0)
    assert transport_op_per_tonne(rail, p) == pytest.approx(15.222, rel=1e-12)
    water = route(Mode.WATER, a=10.0, b=500.0, c=5.0)
    assert transport_op_per_tonne(water, p) == pytest.approx(34.855, rel=1e-12)


def test_worked_example_water_terminal_capital():
    p = EconomicParams()
    got = capital_cost(route(Mode.WATER), 1_000_000.0, p)
    assert got == 2 * 4_585.1 * (1_000_000.0 * 7.0 / 365.0)
    assert got == pytest.approx(175_866_000.0, rel=1e-3)


def test_rail_capital_is_per_access_mile():
    p = EconomicParams()
    r = route(Mode.RAIL, a=2.0, b=300.0, c=3.0)
    assert capital_cost(r, 1e6, p) == 2_000_000.0 * 5.0


def test_revenue_rates_by_category_and_dac():
    p = EconomicParams()
    assert revenue_rate(DemandCategory.STORAGE, False, p) == 85.0
    assert revenue_rate(DemandCategory.STORAGE, True, p) == 180.0
    assert revenue_rate(DemandCategory.UTILIZATION, False, p) == 60.0
    assert revenue_rate(DemandCategory.UTILIZATION, True, p) == 130.0


def test_dac_source_earns_dac_rate():
    s = source(kind="DAC", cost=150.0, tonnes=1e6)
    ev = evaluate_connection(s, sink(), route(), 2025, EconomicParams())
    assert ev.revenue_total == 180.0 * 1e6 * 12


def test_capture_fraction_scales_tonnage():
    s = source(fraction=0.9, tonnes=1e6)
    ev = evaluate_connection(s, sink(), route(), 2025, EconomicParams())
    assert ev.annual_tonnes_moved == 0.9 * 1e6
    assert ev.lifetime_tonnes == 0.9 * 1e6 * 12


def test_revenue_split_is_exact():
    for share in (0.0, 0.25, 0.5, 0.75, 1.0):
        p = EconomicParams(share_to_supply=share)
        ev = evaluate_connection(source(), sink(), route(), 2025, p)
        assert ev.demand_revenue == ev.revenue_total - ev.supply_revenue
        assert ev.supply_revenue == share * ev.revenue_total


def test_profit_ignores_start_year():
    r = route(avail=2025)
    p = EconomicParams()
    early = evaluate_connection(source(), sink(), r, 2025, p)
    late = evaluate_connection(source(), sink(), r, 2032, p)
    assert early.supply_profit == late.supply_profit
    assert early.demand_profit == late.demand_profit


def test_break_even_counts_as_profitable():
    # demand side exactly at zero: cost == (1 - share) * rate * k / m
    p = EconomicParams()
    d = sink(cost=(1 - 0.75) * 85.0 * 12 / 12)
    ev = evaluate_connection(source(cost=20.0), d, route(a=0, b=0, c=0), 2025, p)
    assert ev.demand_profit == 0.0
    assert ev.profitable
    just_under = sink(cost=21.25 + 1e-4)
    ev2 = evaluate_connection(source(cost=20.0), just_under,
                              route(a=0, b=0, c=0), 2025, p)
    assert ev2.demand_profit < -PROFIT_EPS
    assert not ev2.profitable


def test_multipliers_scale_their_own_cost_only():
    base = EconomicParams()
    ev0 = evaluate_connection(source(), sink(), route(), 2025, base)

    cap2 = base.with_multiplier("capture", 2.0)
    ev = evaluate_connection(source(), sink(), route(), 2025, cap2)
    assert ev.capture_cost_total == 2.0 * ev0.capture_cost_total
    assert ev.transport_op_total == ev0.transport_op_total
    assert ev.demand_cost_total == ev0.demand_cost_total

    pipe2 = base.with_multiplier("pipeline", 2.0)
    ev = evaluate_connection(source(), sink(), route(), 2025, pipe2)
    assert ev.transport_op_total == 2.0 * ev0.transport_op_total
    assert ev.capex_total == ev0.capex_total  # capital is not swept

    stor2 = base.with_multiplier("storage", 2.0)
    ev = evaluate_connection(source(), sink(), route(), 2025, stor2)
    assert ev.demand_cost_total == 2.0 * ev0.demand_cost_total
    # utilization sinks are exempt from the storage multiplier
    util = sink(category=DemandCategory.UTILIZATION, kind="EOR", cost=5.0)
    evu0 = evaluate_connection(source(), util, route(), 2025, base)
    evu = evaluate_connection(source(), util, route(), 2025, stor2)
    assert evu.demand_cost_total == evu0.demand_cost_total


def test_all_transport_multiplier_spares_truck_legs():
    p = EconomicParams().with_multiplier("all_transport", 2.0)
    water = route(Mode.WATER, a=10.0, b=500.0, c=5.0)
    # water leg doubles, truck access legs do not
    assert transport_op_per_tonne(water, p) == \
        pytest.approx(15.0 * 0.1770 + 2.0 * 500.0 * 0.0644, rel=1e-12)
    rail = route(Mode.RAIL, a=1.0, b=10.0, c=1.0)
    assert transport_op_per_tonne(rail, p) == \
        pytest.approx(2.0 * 0.0708 * 12.0, rel=1e-12)


def test_start_before_availability_rejected():
    with pytest.raises(ValueError, match="start year"):
        evaluate_connection(source(), sink(), route(avail=2030), 2029,
                            EconomicParams())


def test_nonpositive_tonnage_rejected():
    with pytest.raises(ValueError, match="tonnage"):
        evaluate_connection(source(fraction=0.0), sink(), route(), 2025,
                            EconomicParams())


def test_draw_capture_cost_stays_in_range():
    class FakeStream:
        def __init__(self, u):
            self.u = u

        def random(self):
            return self.u

    assert draw_capture_cost("Chemicals", FakeStream(0.0)) == 15.0
    assert draw_capture_cost("Chemicals", FakeStream(1.0)) == 25.0
    assert draw_capture_cost("chemicals", FakeStream(0.5)) == 20.0  # case-insensitive
    assert draw_capture_cost("DAC", FakeStream(0.25)) == 134.0 + 0.25 * 208.0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_vectorized_profits_match_scalar_bitwise(seed):
    rng = np.random.default_rng(seed)
    p = EconomicParams(
        share_to_supply=float(rng.uniform(0, 1)),
        mandated_years=int(rng.integers(12, 19)),
        multipliers=CostMultipliers(*(float(rng.uniform(0.2, 2.0))
                                      for _ in range(5))))
    q = float(rng.uniform(1e4, 5e6))
    cap_cost = float(rng.uniform(10, 300))
    is_dac = bool(rng.random() < 0.3)
    n = int(rng.integers(1, 30))
    mode_code = rng.integers(0, 3, n).astype(np.int64)
    leg_a = rng.uniform(0, 50, n)
    leg_b = rng.uniform(0, 900, n)
    leg_c = rng.uniform(0, 50, n)
    is_storage = rng.random(n) < 0.5
    sink_cost = rng.uniform(0, 30, n)

    sp, dp = row_profits(q, cap_cost, is_dac, mode_code, leg_a, leg_b, leg_c,
                         is_storage, sink_cost, p)

    kind = "DAC" if is_dac else "Chemicals"
    s = source(kind=kind, cost=cap_cost, tonnes=q, fraction=1.0)
    for i in range(n):
        d = sink(cost=float(sink_cost[i]),
                 category=(DemandCategory.STORAGE if is_storage[i]
                           else DemandCategory.UTILIZATION),
                 kind=("Saline Aquifer" if is_storage[i] else "EOR"))
        r = route(Mode(int(mode_code[i])), float(leg_a[i]), float(leg_b[i]),
                  float(leg_c[i]))
        ev = evaluate_connection(s, d, r, 2025, p)
        assert sp[i] == ev.supply_profit
        assert dp[i] == ev.demand_profit
