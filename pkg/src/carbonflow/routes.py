"""Three-leg routes from capture sites to sinks, with build-out versioning.

A route on mode M is: leg A from the source to its nearest available M
node (the entry), leg B from entry to exit, and leg C from the exit to
the sink.  Leg B is the network shortest path for rail and water;
pipelines are assumed buildable point to point, so every pipeline leg is
a plain great-circle distance.  Water access legs are driven by truck;
pipeline and rail access legs are new spur construction on the route's
own mode.

Because networks grow over time, the nearest entry/exit nodes and the
shortest path for a (source, sink, mode) triple can change at network
epochs.  Each distinct geometry is a separate candidate *version*,
available from the epoch where it first appears; older versions remain
usable (built infrastructure does not vanish).  ``RoutePlanner`` builds
the full version table for one source against every sink at once,
vectorized over sinks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from . import _kernels
from .network import ModeNetwork
from .types import ALWAYS, DemandAgent, GeoPoint, Mode, SupplyAgent

_NO_NODE = -1


@dataclass(frozen=True)
class Route:
    supply_id: str
    demand_id: str
    mode: Mode
    entry_node: str
    exit_node: str
    leg_a_miles: float
    leg_b_miles: float
    leg_c_miles: float
    available_year: int = ALWAYS

    @property
    def total_miles(self) -> float:
        return self.leg_a_miles + self.leg_b_miles + self.leg_c_miles

    @property
    def access_miles(self) -> float:
        """First plus last leg: the off-network portion."""
        return self.leg_a_miles + self.leg_c_miles

    @property
    def access_mode(self) -> Mode:
        """Mode carrying legs A and C; water terminals are fed by truck."""
        return Mode.TRUCK if self.mode is Mode.WATER else self.mode


def build_route(s: SupplyAgent, d: DemandAgent, mode: Mode,
                net: ModeNetwork, year: int) -> Optional[Route]:
    """The mode-M route from s to d as the network stands in ``year``.

    None when the mode is not permitted by both agents, no entry or exit
    node is available yet, or the endpoints are disconnected.  The
    route's available_year is the latest availability among the elements
    used and the demand agent itself.
    """
    if mode is not net.mode or mode not in s.allowed_modes \
            or mode not in d.allowed_modes:
        return None
    entry = net.nearest_node(s.location, year)
    exit_ = net.nearest_node(d.location, year)
    if entry is None or exit_ is None:
        return None
    if mode is Mode.PIPELINE:
        ea, xa = net.node(entry[0]).location, net.node(exit_[0]).location
        mid = _kernels.haversine_miles(ea.lon, ea.lat, xa.lon, xa.lat)
    else:
        mid = net.shortest_path_miles(entry[0], exit_[0], year)
    if not math.isfinite(mid):
        return None
    avail = max(net.node(entry[0]).available_year,
                net.node(exit_[0]).available_year, d.available_year)
    return Route(s.id, d.id, mode, entry[0], exit_[0],
                 entry[1], mid, exit_[1], available_year=avail)


def enumerate_candidates(
        s: SupplyAgent, sinks: Sequence[DemandAgent],
        nets: Mapping[Mode, ModeNetwork],
        year_window: tuple[int, int]) -> list[tuple[Route, int]]:
    """All candidate (route, earliest start year) pairs in the window.

    Every distinct route version whose availability falls on or before
    the window's end is a separate candidate; earliest start year is
    max(route.available_year, window start).  Entry/exit nodes are
    re-selected at each network epoch, so a build-out can contribute
    several versions of the same (sink, mode) pair.
    """
    y_from, y_to = year_window
    if y_from > y_to:
        raise ValueError(f"empty year window [{y_from}, {y_to}]")
    out: list[tuple[Route, int]] = []
    for d in sinks:
        for mode in sorted(s.allowed_modes & d.allowed_modes):
            net = nets.get(mode)
            if net is None:
                continue
            last: Optional[Route] = None
            for epoch in net.epochs:
                if epoch > y_to:
                    break
                route = build_route(s, d, mode, net, epoch)
                if route is None:
                    continue
                if last is not None and (
                        last.entry_node == route.entry_node
                        and last.exit_node == route.exit_node
                        and last.leg_b_miles == route.leg_b_miles):
                    continue
                # geometry first appears at this epoch; the demand agent
                # may push availability later
                avail = max(epoch, d.available_year)
                route = Route(route.supply_id, route.demand_id, route.mode,
                              route.entry_node, route.exit_node,
                              route.leg_a_miles, route.leg_b_miles,
                              route.leg_c_miles, available_year=avail)
                if route.available_year <= y_to:
                    out.append((route, max(route.available_year, y_from)))
                last = route
    out.sort(key=lambda c: (c[0].demand_id, c[0].mode, c[0].available_year))
    return out


@dataclass
class CandidateTable:
    """Struct-of-arrays of route versions from one source to many sinks.

    Node references are dense per-mode indices; ``route`` rebuilds a full
    Route with string ids.  ``avail_year`` already folds in each sink's
    own available_year.  ``demand_rank`` is the sink id's lexicographic
    rank among the planner's sinks, used as the final tie-break key.
    """

    sink_pos: np.ndarray      # int64, position in the planner's sink list
    demand_rank: np.ndarray   # int64
    mode_code: np.ndarray     # int64 Mode values
    entry_idx: np.ndarray     # int64 dense node index
    exit_idx: np.ndarray      # int64 dense node index
    avail_year: np.ndarray    # int64
    leg_a: np.ndarray         # float64 miles
    leg_b: np.ndarray
    leg_c: np.ndarray
    networks: Mapping[Mode, ModeNetwork]
    sinks: Sequence[DemandAgent]

    @property
    def n(self) -> int:
        return len(self.sink_pos)

    @property
    def total_miles(self) -> np.ndarray:
        return self.leg_a + self.leg_b + self.leg_c

    @property
    def access_miles(self) -> np.ndarray:
        return self.leg_a + self.leg_c

    def sink(self, i: int) -> DemandAgent:
        return self.sinks[int(self.sink_pos[i])]

    def route(self, i: int, supply_id: str) -> Route:
        mode = Mode(int(self.mode_code[i]))
        net = self.networks[mode]
        return Route(supply_id, self.sink(i).id, mode,
                     net.node_ids[int(self.entry_idx[i])],
                     net.node_ids[int(self.exit_idx[i])],
                     float(self.leg_a[i]), float(self.leg_b[i]),
                     float(self.leg_c[i]),
                     available_year=int(self.avail_year[i]))


_TABLE_COLS = ("sink_pos", "demand_rank", "mode_code", "entry_idx",
               "exit_idx", "avail_year", "leg_a", "leg_b", "leg_c")


class RoutePlanner:
    """Builds candidate tables, amortizing all sink-side geometry.

    Exit nodes and leg C lengths per (mode, epoch) are computed once here
    and reused for every source.  ``max_year`` prunes epochs that arrive
    too late to ever matter (typically the last admission year).
    """

    def __init__(self, networks: Mapping[Mode, ModeNetwork],
                 sinks: Sequence[DemandAgent],
                 max_year: Optional[int] = None):
        self.networks = {m: nw for m, nw in networks.items() if nw.node_count}
        self.sinks = list(sinks)
        self.max_year = max_year
        order = sorted(range(len(self.sinks)), key=lambda i: self.sinks[i].id)
        self._rank = np.empty(len(self.sinks), dtype=np.int64)
        self._rank[order] = np.arange(len(self.sinks))
        self._sink_avail = np.array([d.available_year for d in self.sinks],
                                    dtype=np.int64)
        self._sink_allows: dict[Mode, np.ndarray] = {}
        self._sink_side: dict[Mode, list[tuple[int, np.ndarray, np.ndarray]]] = {}

        lons = np.array([d.location.lon for d in self.sinks], dtype=np.float64)
        lats = np.array([d.location.lat for d in self.sinks], dtype=np.float64)
        for mode, nw in self.networks.items():
            self._sink_allows[mode] = np.array(
                [mode in d.allowed_modes for d in self.sinks], dtype=bool)
            per_epoch = []
            for epoch in self._epochs(nw):
                exit_idx = np.full(len(self.sinks), _NO_NODE, dtype=np.int64)
                leg_c = np.full(len(self.sinks), np.inf, dtype=np.float64)
                for i in range(len(self.sinks)):
                    idx, miles = _kernels.nearest_available(
                        lons[i], lats[i], nw.lons, nw.lats, nw.node_years, epoch)
                    if idx >= 0:
                        exit_idx[i] = idx
                        leg_c[i] = miles
                per_epoch.append((epoch, exit_idx, leg_c))
            self._sink_side[mode] = per_epoch

    def _epochs(self, nw: ModeNetwork) -> list[int]:
        if self.max_year is None:
            return list(nw.epochs)
        return [e for e in nw.epochs if e <= self.max_year]

    def _leg_b_vector(self, nw: ModeNetwork, entry_idx: int, epoch: int,
                      exit_idx: np.ndarray) -> np.ndarray:
        safe = np.maximum(exit_idx, 0)
        if nw.mode is Mode.PIPELINE:
            out = _kernels.haversine_many(
                nw.lons[entry_idx], nw.lats[entry_idx],
                nw.lons[safe], nw.lats[safe])
        else:
            dist = nw.distances_from(nw.node_ids[entry_idx], epoch)
            out = (np.full(len(exit_idx), np.inf)
                   if dist is None else dist[safe].astype(np.float64))
        out[exit_idx == _NO_NODE] = np.inf
        return out

    def table_for(self, source: GeoPoint,
                  allowed_modes: Iterable[Mode]) -> CandidateTable:
        """All route versions from ``source`` to every sink, every mode."""
        n_sinks = len(self.sinks)
        cols: dict[str, list[np.ndarray]] = {k: [] for k in _TABLE_COLS}

        def emit(mask: np.ndarray, mode: Mode, entry_idx: int, leg_a: float,
                 epoch: int, exit_idx: np.ndarray, leg_b: np.ndarray,
                 leg_c: np.ndarray) -> None:
            pos = np.nonzero(mask)[0]
            if len(pos) == 0:
                return
            cols["sink_pos"].append(pos.astype(np.int64))
            cols["demand_rank"].append(self._rank[pos])
            cols["mode_code"].append(np.full(len(pos), int(mode), np.int64))
            cols["entry_idx"].append(np.full(len(pos), entry_idx, np.int64))
            cols["exit_idx"].append(exit_idx[pos])
            cols["avail_year"].append(
                np.maximum(epoch, self._sink_avail[pos]))
            cols["leg_a"].append(np.full(len(pos), leg_a, np.float64))
            cols["leg_b"].append(leg_b[pos])
            cols["leg_c"].append(leg_c[pos])

        for mode in sorted(allowed_modes):
            nw = self.networks.get(mode)
            if nw is None:
                continue
            allows = self._sink_allows[mode]
            cur_valid = np.zeros(n_sinks, dtype=bool)
            cur_entry = _NO_NODE
            cur_exit = np.full(n_sinks, _NO_NODE, dtype=np.int64)
            cur_leg_b = np.full(n_sinks, np.inf, dtype=np.float64)

            for epoch, exit_idx, leg_c in self._sink_side[mode]:
                hit = _kernels.nearest_available(
                    source.lon, source.lat, nw.lons, nw.lats,
                    nw.node_years, epoch)
                if hit[0] < 0:
                    continue
                entry_idx = int(hit[0])
                leg_b = self._leg_b_vector(nw, entry_idx, epoch, exit_idx)
                valid = allows & (exit_idx != _NO_NODE) & np.isfinite(leg_b)
                changed = valid & (~cur_valid
                                   | (cur_entry != entry_idx)
                                   | (cur_exit != exit_idx)
                                   | (cur_leg_b != leg_b))
                if changed.any():
                    emit(changed, mode, entry_idx, float(hit[1]), epoch,
                         exit_idx, leg_b, leg_c)
                    cur_exit[changed] = exit_idx[changed]
                    cur_leg_b[changed] = leg_b[changed]
                    cur_valid |= changed
                cur_entry = entry_idx

        if not cols["sink_pos"]:
            merged = {k: np.empty(0, np.float64 if k.startswith("leg")
                                  else np.int64) for k in _TABLE_COLS}
        else:
            merged = {k: np.concatenate(v) for k, v in cols.items()}
            order = np.lexsort((merged["avail_year"], merged["mode_code"],
                                merged["sink_pos"]))
            merged = {k: v[order] for k, v in merged.items()}
        return CandidateTable(networks=self.networks, sinks=self.sinks, **merged)
