"""Shared builders for tests: agents, networks, worlds."""

from __future__ import annotations

import math
from typing import Optional, Sequence

from carbonflow.dataio import SimulationInputs
from carbonflow.network import ModeNetwork, NetworkEdge, NetworkNode
from carbonflow.scenario import Algorithm, ScenarioConfig
from carbonflow.types import (ALL_LINE_HAUL, DemandAgent, DemandCategory,
                              GeoPoint, Mode, SupplyAgent)


def gp(lon: float, lat: float) -> GeoPoint:
    return GeoPoint(lon, lat)


def source(id: str = "S1", kind: str = "Chemicals", lon: float = 0.0,
           lat: float = 0.0, tonnes: float = 1_000_000.0,
           start: Optional[int] = None, cost: float = 20.0,
           fraction: float = 1.0, modes=None) -> SupplyAgent:
    """A supply agent with pinned capture cost and fraction."""
    return SupplyAgent(
        id=id, source_type=kind, location=gp(lon, lat),
        annual_tonnes=tonnes, start_year=start, capture_cost=cost,
        capture_fraction=fraction,
        allowed_modes=frozenset(modes) if modes is not None else ALL_LINE_HAUL)


def sink(id: str = "D1", lon: float = 0.0, lat: float = 0.0,
         cost: float = 10.0, category: DemandCategory = DemandCategory.STORAGE,
         kind: str = "Saline Aquifer", annual: float = math.inf,
         total: float = math.inf, avail: int = 0,
         end: Optional[int] = None, modes=None) -> DemandAgent:
    return DemandAgent(
        id=id, category=category, sink_type=kind, location=gp(lon, lat),
        cost_per_tonne=cost, annual_capacity=annual, total_capacity=total,
        available_year=avail, end_year=end,
        allowed_modes=frozenset(modes) if modes is not None else ALL_LINE_HAUL)


def net(mode: Mode, nodes: Sequence[tuple], edges: Sequence[tuple] = ()) -> ModeNetwork:
    """Nodes as (id, lon, lat[, year]); edges as (a, b[, miles[, year]])."""
    built_nodes = [NetworkNode(n[0], gp(n[1], n[2]),
                               n[3] if len(n) > 3 else 0) for n in nodes]
    built_edges = [NetworkEdge(e[0], e[1],
                               e[2] if len(e) > 2 else None,
                               e[3] if len(e) > 3 else 0) for e in edges]
    return ModeNetwork(mode, built_nodes, built_edges)


def tri_networks(span: float = 2.0) -> dict[Mode, ModeNetwork]:
    """One 2-node network per line-haul mode, spanning lon 0..span."""
    out = {}
    for i, mode in enumerate((Mode.PIPELINE, Mode.RAIL, Mode.WATER)):
        prefix = mode.name[0]
        lat = 0.05 * i
        out[mode] = net(mode,
                        [(f"{prefix}a", 0.0, lat), (f"{prefix}b", span, lat)],
                        [(f"{prefix}a", f"{prefix}b")])
    return out


def world(sources: Sequence[SupplyAgent], sinks_: Sequence[DemandAgent],
          networks: Optional[dict[Mode, ModeNetwork]] = None) -> SimulationInputs:
    return SimulationInputs(sources=list(sources), sinks=list(sinks_),
                            networks=networks or tri_networks())


def cfg(algorithm: Algorithm = Algorithm.MPFY, seed: int = 1,
        **over) -> ScenarioConfig:
    return ScenarioConfig(algorithm=algorithm, seed=seed, **over)


def random_matching_instance(rng, n_sinks_max: int = 3, n_routes_max: int = 8):
    """A small matching problem with deliberately frequent ties.

    Leg miles and costs sit on coarse grids so distances and profits
    collide often, exercising the full tie-break chain.  Returns
    (agent, candidates, demands, current_year).
    """
    from carbonflow.routes import Route

    agent = source(cost=float(rng.choice([15.0, 20.0, 25.0])),
                   tonnes=float(rng.choice([5e5, 1e6, 2e6])))
    n_sinks = int(rng.integers(1, n_sinks_max + 1))
    demands = {}
    for i in range(n_sinks):
        storage = rng.random() < 0.6
        demands[f"D{i}"] = sink(
            id=f"D{i}",
            category=(DemandCategory.STORAGE if storage
                      else DemandCategory.UTILIZATION),
            kind="Saline Aquifer" if storage else "EOR",
            # straddles the profitability threshold for both categories
            cost=float(rng.choice([5.0, 10.0, 14.0, 16.0, 20.0, 22.0])),
            end=int(rng.integers(2036, 2070)) if rng.random() < 0.3 else None)
    current_year = int(rng.integers(2025, 2033))
    candidates = []
    for _ in range(int(rng.integers(1, n_routes_max + 1))):
        mode = Mode(int(rng.integers(0, 3)))
        d_id = f"D{int(rng.integers(0, n_sinks))}"
        legs = [float(rng.choice([0.0, 5.0, 10.0, 25.0])),
                float(rng.choice([50.0, 100.0, 200.0, 400.0])),
                float(rng.choice([0.0, 5.0, 10.0, 25.0]))]
        avail = int(rng.choice([2025, current_year, 2030, 2031, 2032]))
        route = Route(agent.id, d_id, mode,
                      entry_node=f"{mode.name[0]}E{int(rng.integers(0, 2))}",
                      exit_node=f"{mode.name[0]}X{int(rng.integers(0, 2))}",
                      leg_a_miles=legs[0], leg_b_miles=legs[1],
                      leg_c_miles=legs[2], available_year=avail)
        candidates.append((route, max(avail, 2025)))
    return agent, candidates, demands, current_year
