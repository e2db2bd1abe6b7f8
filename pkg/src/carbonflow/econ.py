"""Connection economics: cost draws, revenue split, and profitability.

Revenue is the per-tonne tax credit, accrued only for ``credit_years``
and split between the two agents by ``share_to_supply``.  Costs accrue
for the full mandated duration: the supply side pays capture, transport
operations, and the access-leg capital; the demand side pays only its
own per-tonne cost.  A connection is profitable when both sides clear
break-even (absolute tolerance 1e-6 USD).

``row_profits`` is the vectorized twin of ``evaluate_connection``: it
performs the same floating-point operations in the same order, so the
two agree bitwise and the engine's bulk path never drifts from the
scalar definition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .routes import Route
from .types import (CAPTURE_COST_RANGES, DemandAgent, DemandCategory,
                    EconomicParams, Mode, SupplyAgent, canonical_source_type)

#: Absolute tolerance, in USD, for break-even profitability comparisons.
PROFIT_EPS = 1e-6


@dataclass(frozen=True)
class ConnectionEvaluation:
    """Full lifetime economics of one candidate connection."""

    route: Route
    start_year: int
    annual_tonnes_moved: float
    revenue_total: float
    supply_revenue: float
    demand_revenue: float
    capture_cost_total: float
    transport_op_total: float
    capex_total: float
    demand_cost_total: float
    supply_profit: float
    demand_profit: float
    profitable: bool
    total_distance: float
    ac_distance: float
    lifetime_tonnes: float

    @property
    def combined_profit(self) -> float:
        return self.supply_profit + self.demand_profit

    @property
    def profit_per_tonne(self) -> float:
        return (self.combined_profit / self.lifetime_tonnes
                if self.lifetime_tonnes else 0.0)


def draw_capture_cost(source_type: str, rng_stream) -> float:
    """One uniform draw from the source type's capture-cost range."""
    lo, hi = CAPTURE_COST_RANGES[canonical_source_type(source_type)]
    return lo + (hi - lo) * rng_stream.random()


def revenue_rate(sink_category: DemandCategory, source_is_dac: bool,
                 params: EconomicParams) -> float:
    """Tax-credit USD per tonne for this sink category and source kind."""
    if sink_category is DemandCategory.STORAGE:
        return params.revenue_storage_dac if source_is_dac else params.revenue_storage
    return params.revenue_utilization_dac if source_is_dac else params.revenue_utilization


def transport_op_per_tonne(route: Route, params: EconomicParams) -> float:
    """Operating cost in USD per tonne moved over the whole route.

    Pipeline and rail charge their own rate over all three legs; water
    charges the water rate on the line haul and the truck rate on the
    access legs.  Each leg's rate is scaled by its carrier's multiplier.
    """
    mult = params.multipliers
    if route.mode is Mode.WATER:
        truck = params.rate_truck * mult.for_mode(Mode.TRUCK)
        water = params.rate_water * mult.water
        return truck * route.access_miles + water * route.leg_b_miles
    rate = params.transport_rate(route.mode) * mult.for_mode(route.mode)
    return rate * route.total_miles


def capital_cost(route: Route, annual_tonnes: float,
                 params: EconomicParams) -> float:
    """Up-front capital charged to the supply side.

    Pipeline and rail pay per mile of access spur (legs A and C only;
    line-haul infrastructure is externally funded).  Water pays for
    loading and unloading terminals sized to a buffer of
    ``terminal_buffer_days`` of throughput.
    """
    if route.mode is Mode.PIPELINE:
        return params.capex_pipeline_per_mile * route.access_miles
    if route.mode is Mode.RAIL:
        return params.capex_rail_per_mile * route.access_miles
    return (params.water_terminal_count * params.capex_water_terminal_per_tonne
            * (annual_tonnes * params.terminal_buffer_days / 365.0))


def evaluate_connection(s: SupplyAgent, d: DemandAgent, route: Route,
                        start_year: int,
                        params: EconomicParams) -> ConnectionEvaluation:
    """Lifetime evaluation of connecting s to d over ``route``.

    Revenue accrues for credit_years, all costs for mandated_years; the
    verdict does not depend on start_year, which only gates validity.
    """
    if start_year < route.available_year:
        raise ValueError(
            f"start year {start_year} precedes route availability "
            f"{route.available_year}")
    q = s.effective_tonnes
    if not q > 0:
        raise ValueError(f"agent {s.id}: nonpositive effective tonnage {q}")

    mult = params.multipliers
    years_m = params.mandated_years
    rate = revenue_rate(d.category, s.is_dac, params)

    revenue_total = rate * q * params.credit_years
    supply_revenue = params.share_to_supply * revenue_total
    demand_revenue = revenue_total - supply_revenue

    capture_total = s.capture_cost * mult.capture * q * years_m
    op_total = transport_op_per_tonne(route, params) * q * years_m
    capex_total = capital_cost(route, q, params)
    demand_mult = mult.storage if d.category is DemandCategory.STORAGE else 1.0
    demand_cost_total = d.cost_per_tonne * demand_mult * q * years_m

    supply_profit = supply_revenue - (capture_total + op_total + capex_total)
    demand_profit = demand_revenue - demand_cost_total

    return ConnectionEvaluation(
        route=route, start_year=start_year, annual_tonnes_moved=q,
        revenue_total=revenue_total, supply_revenue=supply_revenue,
        demand_revenue=demand_revenue, capture_cost_total=capture_total,
        transport_op_total=op_total, capex_total=capex_total,
        demand_cost_total=demand_cost_total, supply_profit=supply_profit,
        demand_profit=demand_profit,
        profitable=(supply_profit >= -PROFIT_EPS
                    and demand_profit >= -PROFIT_EPS),
        total_distance=route.total_miles, ac_distance=route.access_miles,
        lifetime_tonnes=q * years_m)


ArrayLike = Union[np.ndarray, float]


def row_profits(q: float, capture_cost: float, is_dac: bool,
                mode_code: np.ndarray, leg_a: np.ndarray, leg_b: np.ndarray,
                leg_c: np.ndarray, sink_is_storage: np.ndarray,
                sink_cost: np.ndarray,
                params: EconomicParams) -> tuple[np.ndarray, np.ndarray]:
    """(supply_profit, demand_profit) arrays for many candidate rows.

    Bitwise-identical to evaluate_connection applied row by row: every
    arithmetic step mirrors the scalar code's operation order.
    """
    mult = params.multipliers
    years_m = params.mandated_years

    r_storage = params.revenue_storage_dac if is_dac else params.revenue_storage
    r_util = params.revenue_utilization_dac if is_dac else params.revenue_utilization
    rate = np.where(sink_is_storage, r_storage, r_util)

    revenue_total = rate * q * params.credit_years
    supply_revenue = params.share_to_supply * revenue_total
    demand_revenue = revenue_total - supply_revenue

    total = leg_a + leg_b + leg_c
    access = leg_a + leg_c
    op_per_t = np.empty(len(mode_code), dtype=np.float64)
    capex = np.empty(len(mode_code), dtype=np.float64)
    for mode in (Mode.PIPELINE, Mode.RAIL):
        mask = mode_code == int(mode)
        if mask.any():
            eff = params.transport_rate(mode) * mult.for_mode(mode)
            op_per_t[mask] = eff * total[mask]
            per_mile = (params.capex_pipeline_per_mile if mode is Mode.PIPELINE
                        else params.capex_rail_per_mile)
            capex[mask] = per_mile * access[mask]
    mask = mode_code == int(Mode.WATER)
    if mask.any():
        truck = params.rate_truck * mult.for_mode(Mode.TRUCK)
        water = params.rate_water * mult.water
        op_per_t[mask] = truck * access[mask] + water * leg_b[mask]
        capex[mask] = (params.water_terminal_count
                       * params.capex_water_terminal_per_tonne
                       * (q * params.terminal_buffer_days / 365.0))

    capture_total = capture_cost * mult.capture * q * years_m
    op_total = op_per_t * q * years_m
    demand_cost = np.where(sink_is_storage, sink_cost * mult.storage,
                           sink_cost * 1.0)
    demand_cost_total = demand_cost * q * years_m

    supply_profit = supply_revenue - (capture_total + op_total + capex)
    demand_profit = demand_revenue - demand_cost_total
    return supply_profit, demand_profit
