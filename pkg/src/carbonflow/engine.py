"""Annual-tick simulation: release, selection, connection, completion.

One replication owns mutable copies of its supply agents; each agent's
random quantities come from dedicated substreams so they are identical
across algorithms under a shared seed.  Selection economics are computed
once per agent as vectorized candidate rows; the yearly decision is then
a cheap mask-and-pick.  The scalar evaluation path produces the recorded
ConnectionEvaluation and agrees bitwise with the vectorized rows.

Connections admit through ``last_admission_year`` and stay active for
``mandated_years``; the run is extended past ``horizon_end`` when needed
so every connection's full life is accounted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import rng
from .dataio import SimulationInputs, load_inputs
from .econ import (ConnectionEvaluation, draw_capture_cost,
                   evaluate_connection, row_profits, PROFIT_EPS)
from .matching import pick_row
from .routes import CandidateTable, RoutePlanner
from .scenario import ScenarioConfig, validate_scenario
from .types import AgentState, DemandCategory, Mode, SupplyAgent


@dataclass(frozen=True)
class Connection:
    supply_id: str
    demand_id: str
    route: "Route"
    start_year: int
    end_year: int
    annual_tonnes_moved: float
    evaluation: ConnectionEvaluation

    @property
    def mode(self) -> Mode:
        return self.route.mode

    @property
    def lifetime_tonnes(self) -> float:
        return self.annual_tonnes_moved * (self.end_year - self.start_year + 1)

    def active_in(self, year: int) -> bool:
        return self.start_year <= year <= self.end_year


@dataclass(frozen=True)
class Event:
    year: int
    kind: str  # released | connected | deferred | no_match | completed
    supply_id: str
    demand_id: Optional[str] = None
    target_year: Optional[int] = None


@dataclass(frozen=True)
class Stats:
    mean: float = 0.0
    median: float = 0.0
    std: float = 0.0

    @classmethod
    def of(cls, values) -> "Stats":
        arr = np.asarray(values, dtype=np.float64)
        if arr.size == 0:
            return cls()
        return cls(mean=float(arr.mean()), median=float(np.median(arr)),
                   std=float(arr.std()))


@dataclass(frozen=True)
class ReplicationResult:
    connections: tuple[Connection, ...]
    annual_capture: dict[tuple[int, Mode], float]
    total_tonnes: float
    tonnes_by_mode: dict[Mode, float]
    total_distance_stats: Stats
    ac_distance_stats: Stats
    profit_per_tonne: float
    seed: int
    events: tuple[Event, ...] = ()

    @property
    def n_connections(self) -> int:
        return len(self.connections)

    @property
    def mode_shares(self) -> dict[Mode, float]:
        if self.total_tonnes <= 0:
            return {m: 0.0 for m in self.tonnes_by_mode}
        return {m: t / self.total_tonnes for m, t in self.tonnes_by_mode.items()}

    def annual_totals(self) -> dict[int, float]:
        """Tonnes captured per year, summed over modes."""
        years: dict[int, list[float]] = {}
        for (year, _mode), tonnes in sorted(self.annual_capture.items()):
            years.setdefault(year, []).append(tonnes)
        return {y: math.fsum(parts) for y, parts in years.items()}


def assign_start_years(agents: list[SupplyAgent], seed: int, first_year: int,
                       last_admission_year: int) -> None:
    """Fill in missing start years, uniform over the admission window.

    Each agent draws from its own substream, so the assignment of one
    agent never depends on which other agents were pre-pinned.
    """
    for agent in agents:
        if agent.start_year is None:
            stream = rng.substream(seed, agent.id, rng.START_YEAR)
            agent.start_year = int(stream.integers(
                first_year, last_admission_year, endpoint=True))


@dataclass
class _AgentRows:
    """Static per-agent candidate economics, computed once."""

    table: CandidateTable
    supply_profit: np.ndarray
    static_mask: np.ndarray   # profitable & admissible & within sink end cap
    start_cap: np.ndarray     # latest legal start year per row (float, inf ok)
    sink_pos: np.ndarray
    total_miles: np.ndarray
    access_miles: np.ndarray


class Simulation:
    """One replication's full mutable state."""

    def __init__(self, cfg: ScenarioConfig, inputs: SimulationInputs):
        problems = validate_scenario(cfg)
        if problems:
            raise ValueError("invalid scenario: "
                             + "; ".join(str(p) for p in problems))
        self.cfg = cfg
        self.params = cfg.econ
        self.seed = cfg.seed
        self.last_admission = cfg.last_admission_year
        self.final_year = max(cfg.horizon_end,
                              cfg.last_admission_year
                              + self.params.mandated_years - 1)

        self.sources = sorted((replace(s) for s in inputs.sources),
                              key=lambda s: s.id)
        ids = [s.id for s in self.sources]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate supply agent ids")
        lo, hi = cfg.capture_fraction_lo, cfg.capture_fraction_hi
        for s in self.sources:
            s.state = AgentState.WAITING
            s.capture_cost = draw_capture_cost(
                s.source_type, rng.substream(self.seed, s.id, rng.CAPTURE_COST))
            stream = rng.substream(self.seed, s.id, rng.CAPTURE_FRACTION)
            s.capture_fraction = lo + (hi - lo) * stream.random()
        assign_start_years(self.sources, self.seed, cfg.first_year,
                           cfg.last_admission_year)
        for s in self.sources:
            if not cfg.first_year <= s.start_year <= cfg.last_admission_year:
                raise ValueError(
                    f"agent {s.id}: start_year {s.start_year} outside "
                    f"[{cfg.first_year}, {cfg.last_admission_year}]")

        self.sinks = sorted(inputs.sinks, key=lambda d: d.id)
        sink_ids = [d.id for d in self.sinks]
        if len(set(sink_ids)) != len(sink_ids):
            raise ValueError("duplicate demand agent ids")
        self.planner = RoutePlanner(inputs.networks, self.sinks,
                                    max_year=cfg.last_admission_year)
        self._sink_is_storage = np.array(
            [d.category is DemandCategory.STORAGE for d in self.sinks])
        self._sink_cost = np.array([d.cost_per_tonne for d in self.sinks])
        horizon = self.params.mandated_years - 1
        self._sink_start_cap = np.array(
            [math.inf if d.end_year is None else d.end_year - horizon
             for d in self.sinks], dtype=np.float64)
        self._remaining_annual = np.array(
            [d.annual_capacity for d in self.sinks], dtype=np.float64)
        self._remaining_total = np.array(
            [d.total_capacity for d in self.sinks], dtype=np.float64)

        self.connections: list[Connection] = []
        self.events: list[Event] = []
        self.annual_capture: dict[tuple[int, Mode], float] = {}
        self._by_agent: dict[str, Connection] = {}
        self._rows: dict[str, _AgentRows] = {}
        self._settled: set[str] = set()  # connected or permanently unmatched

    def _rows_for(self, agent: SupplyAgent) -> _AgentRows:
        rows = self._rows.get(agent.id)
        if rows is not None:
            return rows
        table = self.planner.table_for(agent.location, agent.allowed_modes)
        sink_pos = table.sink_pos
        supply_profit, demand_profit = row_profits(
            agent.effective_tonnes, agent.capture_cost, agent.is_dac,
            table.mode_code, table.leg_a, table.leg_b, table.leg_c,
            self._sink_is_storage[sink_pos], self._sink_cost[sink_pos],
            self.params)
        start_cap = np.minimum(self._sink_start_cap[sink_pos],
                               float(self.last_admission))
        static_mask = ((supply_profit >= -PROFIT_EPS)
                       & (demand_profit >= -PROFIT_EPS)
                       & (table.avail_year <= start_cap))
        rows = _AgentRows(table=table, supply_profit=supply_profit,
                          static_mask=static_mask, start_cap=start_cap,
                          sink_pos=sink_pos, total_miles=table.total_miles,
                          access_miles=table.access_miles)
        self._rows[agent.id] = rows
        return rows

    def _decide(self, agent: SupplyAgent, year: int) -> Optional[Event]:
        rows = self._rows_for(agent)
        table = rows.table
        if table.n == 0:
            self._settle(agent.id)
            return Event(year, "no_match", agent.id)

        q = agent.effective_tonnes
        lifetime = q * self.params.mandated_years
        e_years = np.maximum(table.avail_year, year)
        mask = (rows.static_mask
                & (e_years <= rows.start_cap)
                & (q <= self._remaining_annual[rows.sink_pos])
                & (lifetime <= self._remaining_total[rows.sink_pos]))
        chosen = pick_row(self.cfg.algorithm, e_years, mask,
                          rows.supply_profit, rows.total_miles,
                          rows.access_miles, table.mode_code,
                          table.demand_rank, table.entry_idx, table.exit_idx)
        if chosen is None:
            self._settle(agent.id)
            return Event(year, "no_match", agent.id)
        if e_years[chosen] > year:
            return Event(year, "deferred", agent.id,
                         demand_id=table.sink(chosen).id,
                         target_year=int(e_years[chosen]))
        return self._connect(agent, rows, chosen, year)

    def _connect(self, agent: SupplyAgent, rows: _AgentRows, i: int,
                 year: int) -> Event:
        table = rows.table
        sink = table.sink(i)
        route = table.route(i, agent.id)
        evaluation = evaluate_connection(agent, sink, route, year, self.params)
        conn = Connection(
            supply_id=agent.id, demand_id=sink.id, route=route,
            start_year=year,
            end_year=year + self.params.mandated_years - 1,
            annual_tonnes_moved=evaluation.annual_tonnes_moved,
            evaluation=evaluation)
        self.connections.append(conn)
        self._by_agent[agent.id] = conn
        pos = int(table.sink_pos[i])
        self._remaining_annual[pos] -= conn.annual_tonnes_moved
        self._remaining_total[pos] -= conn.lifetime_tonnes
        for y in range(conn.start_year, conn.end_year + 1):
            key = (y, conn.mode)
            self.annual_capture[key] = (self.annual_capture.get(key, 0.0)
                                        + conn.annual_tonnes_moved)
        agent.state = AgentState.CONNECTED
        self._settle(agent.id)
        return Event(year, "connected", agent.id, demand_id=sink.id,
                     target_year=year)

    def _settle(self, agent_id: str) -> None:
        self._settled.add(agent_id)
        self._rows.pop(agent_id, None)

    def step_year(self, year: int) -> list[Event]:
        """Advance one year; returns this year's lifecycle events."""
        events: list[Event] = []
        for s in self.sources:
            if s.state is AgentState.WAITING and s.start_year == year:
                s.state = AgentState.SELECTING
                events.append(Event(year, "released", s.id))
        if year <= self.last_admission:
            for s in self.sources:
                if s.state is AgentState.SELECTING \
                        and s.id not in self._settled:
                    event = self._decide(s, year)
                    if event is not None:
                        events.append(event)
        for s in self.sources:
            if s.state is AgentState.CONNECTED \
                    and self._by_agent[s.id].end_year < year:
                s.state = AgentState.COMPLETE
                events.append(Event(year, "completed", s.id,
                                    demand_id=self._by_agent[s.id].demand_id))
        self.events.extend(events)
        return events

    def run(self) -> ReplicationResult:
        for year in range(self.cfg.first_year, self.final_year + 1):
            self.step_year(year)
        return self._result()

    def _result(self) -> ReplicationResult:
        conns = self.connections
        # fsum keeps every total exactly rounded, so aggregation order
        # (which varies across algorithms) can never perturb totals
        total = math.fsum(c.lifetime_tonnes for c in conns)
        by_mode = {
            mode: math.fsum(c.lifetime_tonnes for c in conns
                            if c.mode is mode)
            for mode in (Mode.PIPELINE, Mode.RAIL, Mode.WATER)}
        profit = math.fsum(c.evaluation.combined_profit for c in conns)
        return ReplicationResult(
            connections=tuple(conns),
            annual_capture=dict(self.annual_capture),
            total_tonnes=total,
            tonnes_by_mode=by_mode,
            total_distance_stats=Stats.of(
                [c.evaluation.total_distance for c in conns]),
            ac_distance_stats=Stats.of(
                [c.evaluation.ac_distance for c in conns]),
            profit_per_tonne=(profit / total) if total > 0 else 0.0,
            seed=self.seed,
            events=tuple(self.events))


def step_year(sim: Simulation, year: int) -> list[Event]:
    """Module-level alias for Simulation.step_year."""
    return sim.step_year(year)


def run_replication(cfg: ScenarioConfig,
                    inputs: Optional[SimulationInputs] = None) -> ReplicationResult:
    """Run one full replication of ``cfg``; loads inputs when not given."""
    if inputs is None:
        inputs = load_inputs(cfg)
    return Simulation(cfg, inputs).run()
