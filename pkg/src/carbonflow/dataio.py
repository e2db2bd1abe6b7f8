"""CSV ingestion, validation, and result serialization.

All input files are UTF-8 CSV with required headers.  Any malformed row
aborts the load with a LoadError naming the file, line number, and
column.  ``inf`` (or a blank) is the unlimited-capacity sentinel; blank
storage costs fall back to the configured default; food-and-beverage
sinks silently lose pipeline permission (with a log warning), since
food-grade CO2 cannot be delivered by pipeline.

Writers are exactly inverse to the loaders so generated scenarios
round-trip, and all output is deterministic: fixed field order, repr
floats, sorted JSON keys.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

from .network import ModeNetwork, NetworkEdge, NetworkNode
from .scenario import ScenarioConfig
from .types import (ALL_LINE_HAUL, ALWAYS, DemandAgent, DemandCategory,
                    GeoPoint, Mode, SupplyAgent, UNLIMITED, is_food_grade)

log = logging.getLogger("carbonflow.dataio")


class LoadError(Exception):
    """Unusable input file; message carries file, line, and column."""


#: Marks a parse with no fallback: a blank cell is an error.
_REQUIRED = object()


@dataclass(frozen=True)
class PopulationCell:
    location: GeoPoint
    daytime: float
    nighttime: float


#: A sparse population grid: sampled counts at known points.
PopulationGrid = list[PopulationCell]


@dataclass(frozen=True)
class SimulationInputs:
    sources: list[SupplyAgent]
    sinks: list[DemandAgent]
    networks: dict[Mode, ModeNetwork]


class _Sheet:
    """CSV reader that attributes every failure to file:line column."""

    def __init__(self, path, required: Sequence[str],
                 optional: Sequence[str] = ()):
        self.path = Path(path)
        try:
            text = self.path.read_text(encoding="utf-8")
        except OSError as exc:
            raise LoadError(f"cannot read {self.path}: {exc}") from exc
        rows = list(csv.reader(text.splitlines()))
        if not rows:
            raise LoadError(f"{self.path}, line 1: missing header")
        header = [h.strip() for h in rows[0]]
        known = list(required) + list(optional)
        for col in required:
            if col not in header:
                raise LoadError(
                    f"{self.path}, line 1: missing required column {col!r}")
        for col in header:
            if col not in known:
                raise LoadError(
                    f"{self.path}, line 1: unknown column {col!r}")
        self.header = header
        self.rows = rows[1:]

    def __iter__(self):
        for offset, raw in enumerate(self.rows):
            if not any(cell.strip() for cell in raw):
                continue
            lineno = offset + 2
            if len(raw) != len(self.header):
                raise LoadError(
                    f"{self.path}, line {lineno}: expected "
                    f"{len(self.header)} fields, got {len(raw)}")
            yield _Record(self, lineno,
                          dict(zip(self.header, (c.strip() for c in raw))))


class _Record:
    def __init__(self, sheet: _Sheet, lineno: int, cells: dict[str, str]):
        self._sheet = sheet
        self.lineno = lineno
        self._cells = cells

    def fail(self, column: str, message: str) -> LoadError:
        return LoadError(f"{self._sheet.path}, line {self.lineno}, "
                         f"column {column}: {message}")

    def raw(self, column: str) -> str:
        return self._cells.get(column, "")

    def parse(self, column: str, conv: Callable, default=_REQUIRED):
        """Convert a cell; blank or absent cells map to default."""
        text = self.raw(column)
        if not text:
            if default is _REQUIRED:
                raise self.fail(column, "value required")
            return default
        try:
            return conv(text)
        except (ValueError, KeyError) as exc:
            raise self.fail(column, str(exc) or f"bad value {text!r}") from exc


def _capacity(text: str) -> float:
    value = UNLIMITED if text.lower() in ("inf", "unlimited") else float(text)
    if value != UNLIMITED and value < 0:
        raise ValueError(f"capacity must be >= 0 or inf, got {text}")
    return value


def _mode_set(text: str) -> frozenset:
    return frozenset(Mode.parse(part) for part in text.split("|") if part)


def _point(rec: _Record) -> GeoPoint:
    lon = rec.parse("lon", float)
    lat = rec.parse("lat", float)
    try:
        return GeoPoint(lon, lat)
    except ValueError as exc:
        raise rec.fail("lon" if "lon" in str(exc) else "lat", str(exc)) from exc


def load_sources(path) -> list[SupplyAgent]:
    """Supply agents from `id,type,lon,lat,annual_tonnes[,start_year][,allowed_modes]`."""
    sheet = _Sheet(path, required=("id", "type", "lon", "lat", "annual_tonnes"),
                   optional=("start_year", "allowed_modes"))
    agents: list[SupplyAgent] = []
    seen: set[str] = set()
    for rec in sheet:
        agent_id = rec.parse("id", str)
        if agent_id in seen:
            raise rec.fail("id", f"duplicate id {agent_id!r}")
        seen.add(agent_id)
        point = _point(rec)
        tonnes = rec.parse("annual_tonnes", float)
        if not tonnes > 0:
            raise rec.fail("annual_tonnes", f"must be > 0, got {tonnes}")
        try:
            agent = SupplyAgent(
                id=agent_id,
                source_type=rec.parse("type", str),
                location=point,
                annual_tonnes=tonnes,
                start_year=rec.parse("start_year", int, default=None),
                allowed_modes=rec.parse("allowed_modes", _mode_set,
                                        default=ALL_LINE_HAUL))
        except ValueError as exc:
            raise rec.fail("type", str(exc)) from exc
        agents.append(agent)
    return agents


def load_sinks(path, storage_cost_default: float = 10.0) -> list[DemandAgent]:
    """Demand agents; blank Storage cost defaults, food-grade loses pipeline."""
    sheet = _Sheet(path, required=(
        "id", "category", "type", "lon", "lat", "cost_per_tonne",
        "annual_capacity", "total_capacity", "available_year", "end_year",
        "allowed_modes"))
    sinks: list[DemandAgent] = []
    seen: set[str] = set()
    for rec in sheet:
        sink_id = rec.parse("id", str)
        if sink_id in seen:
            raise rec.fail("id", f"duplicate id {sink_id!r}")
        seen.add(sink_id)
        category = rec.parse("category", DemandCategory.parse)
        sink_type = rec.parse("type", str)
        cost_text = rec.raw("cost_per_tonne")
        if cost_text:
            cost = rec.parse("cost_per_tonne", float)
        else:
            cost = (storage_cost_default
                    if category is DemandCategory.STORAGE else 0.0)
        if cost < 0:
            raise rec.fail("cost_per_tonne", f"must be >= 0, got {cost}")
        modes = rec.parse("allowed_modes", _mode_set, default=ALL_LINE_HAUL)
        if is_food_grade(sink_type) and Mode.PIPELINE in modes:
            log.warning("%s line %d: sink %s is food grade; removing "
                        "pipeline from allowed modes",
                        path, rec.lineno, sink_id)
            modes = modes - {Mode.PIPELINE}
        point = _point(rec)
        available_year = rec.parse("available_year", int, default=ALWAYS)
        end_year = rec.parse("end_year", int, default=None)
        if end_year is not None and available_year > end_year:
            raise rec.fail("end_year",
                           f"end_year {end_year} precedes available_year "
                           f"{available_year}")
        sinks.append(DemandAgent(
            id=sink_id, category=category, sink_type=sink_type,
            location=point, cost_per_tonne=cost,
            annual_capacity=rec.parse("annual_capacity", _capacity,
                                      default=UNLIMITED),
            total_capacity=rec.parse("total_capacity", _capacity,
                                     default=UNLIMITED),
            available_year=available_year, end_year=end_year,
            allowed_modes=modes))
    return sinks


def load_network(nodes_path, edges_path, mode: Mode) -> ModeNetwork:
    """One mode's graph from its node and edge CSVs.

    Rail and water are available from the start of the simulation by
    definition; nonzero availability years in their files are clamped to
    always-available with a warning.  Pipeline years pass through and
    drive the build-out epochs.
    """
    node_sheet = _Sheet(nodes_path,
                        required=("node_id", "lon", "lat", "available_year"))
    nodes: list[NetworkNode] = []
    ids: set[str] = set()
    clamped = 0
    for rec in node_sheet:
        node_id = rec.parse("node_id", str)
        if node_id in ids:
            raise rec.fail("node_id", f"duplicate node id {node_id!r}")
        ids.add(node_id)
        year = rec.parse("available_year", int, default=ALWAYS)
        if mode is not Mode.PIPELINE and year != ALWAYS:
            clamped += 1
            year = ALWAYS
        nodes.append(NetworkNode(node_id, _point(rec), year))
    if clamped:
        log.warning("%s: clamped %d %s availability years to the start "
                    "of the simulation", nodes_path, clamped, mode.label)

    edge_sheet = _Sheet(edges_path,
                        required=("from", "to", "miles", "available_year"))
    edges: list[NetworkEdge] = []
    clamped = 0
    for rec in edge_sheet:
        a = rec.parse("from", str)
        b = rec.parse("to", str)
        for endpoint, col in ((a, "from"), (b, "to")):
            if endpoint not in ids:
                raise rec.fail(col, f"unknown node id {endpoint!r}")
        miles = rec.parse("miles", float, default=None)
        if miles is not None and not miles > 0:
            raise rec.fail("miles", f"must be > 0 when given, got {miles}")
        year = rec.parse("available_year", int, default=ALWAYS)
        if mode is not Mode.PIPELINE and year != ALWAYS:
            clamped += 1
            year = ALWAYS
        edges.append(NetworkEdge(a, b, miles, year))
    if clamped:
        log.warning("%s: clamped %d %s availability years to the start "
                    "of the simulation", edges_path, clamped, mode.label)
    return ModeNetwork(mode, nodes, edges)


def load_population(path) -> PopulationGrid:
    """Sampled day/night population counts from `lon,lat,daytime,nighttime`."""
    sheet = _Sheet(path, required=("lon", "lat", "daytime", "nighttime"))
    grid: PopulationGrid = []
    for rec in sheet:
        day = rec.parse("daytime", float)
        night = rec.parse("nighttime", float)
        for value, col in ((day, "daytime"), (night, "nighttime")):
            if value < 0:
                raise rec.fail(col, f"must be >= 0, got {value}")
        grid.append(PopulationCell(_point(rec), day, night))
    return grid


def load_inputs(cfg: ScenarioConfig) -> SimulationInputs:
    """Load every file a scenario references."""
    sources = load_sources(cfg.path("sources_file"))
    sinks = load_sinks(cfg.path("sinks_file"),
                       storage_cost_default=cfg.econ.storage_cost_default)
    networks = {
        mode: load_network(*cfg.network_paths(mode), mode)
        for mode in (Mode.PIPELINE, Mode.RAIL, Mode.WATER)}
    return SimulationInputs(sources=sources, sinks=sinks, networks=networks)


# ---------------------------------------------------------------------------
# Writers


def _fmt(value) -> str:
    if isinstance(value, float):
        if value == UNLIMITED:
            return "inf"
        return repr(float(value))
    if value is None:
        return ""
    return str(value)


def _write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(cell) for cell in row])
    return path


def _modes_text(modes: frozenset) -> str:
    return "|".join(m.label for m in sorted(modes))


def write_sources(agents: Sequence[SupplyAgent], path) -> Path:
    return _write_csv(
        path,
        ("id", "type", "lon", "lat", "annual_tonnes", "start_year",
         "allowed_modes"),
        ((a.id, a.source_type, a.location.lon, a.location.lat,
          a.annual_tonnes, a.start_year, _modes_text(a.allowed_modes))
         for a in agents))


def write_sinks(sinks: Sequence[DemandAgent], path) -> Path:
    return _write_csv(
        path,
        ("id", "category", "type", "lon", "lat", "cost_per_tonne",
         "annual_capacity", "total_capacity", "available_year", "end_year",
         "allowed_modes"),
        ((d.id, d.category.value, d.sink_type, d.location.lon,
          d.location.lat, d.cost_per_tonne, d.annual_capacity,
          d.total_capacity, d.available_year, d.end_year,
          _modes_text(d.allowed_modes))
         for d in sinks))


def write_network(nodes: Sequence[NetworkNode], edges: Sequence[NetworkEdge],
                  nodes_path, edges_path) -> tuple[Path, Path]:
    np_ = _write_csv(nodes_path, ("node_id", "lon", "lat", "available_year"),
                     ((n.id, n.location.lon, n.location.lat, n.available_year)
                      for n in nodes))
    ep = _write_csv(edges_path, ("from", "to", "miles", "available_year"),
                    ((e.node_a, e.node_b, e.miles, e.available_year)
                     for e in edges))
    return np_, ep


def summary_dict(result) -> dict:
    """The summary.json payload for one replication."""
    def stats(s) -> dict:
        return {"mean": s.mean, "median": s.median, "std": s.std}

    return {
        "total_tonnes": result.total_tonnes,
        "tonnes_by_mode": {m.label: t
                           for m, t in sorted(result.tonnes_by_mode.items())},
        "mode_shares": {m.label: s
                        for m, s in sorted(result.mode_shares.items())},
        "distance_stats": {"total": stats(result.total_distance_stats),
                           "ac": stats(result.ac_distance_stats)},
        "profit_per_tonne": result.profit_per_tonne,
        "n_connections": result.n_connections,
        "seed": result.seed,
    }


_CONNECTION_COLUMNS = (
    "supply_id", "demand_id", "mode", "start_year", "end_year",
    "annual_tonnes", "entry_node", "exit_node", "leg_a_miles", "leg_b_miles",
    "leg_c_miles", "total_miles", "ac_miles", "revenue_total",
    "supply_revenue", "demand_revenue", "capture_cost_total",
    "transport_op_total", "capex_total", "demand_cost_total",
    "supply_profit", "demand_profit")


def write_outputs(result, out_dir) -> dict[str, Path]:
    """connections.csv, annual.csv, and summary.json for one replication."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    def connection_row(c):
        ev = c.evaluation
        r = c.route
        return (c.supply_id, c.demand_id, r.mode.label, c.start_year,
                c.end_year, c.annual_tonnes_moved, r.entry_node, r.exit_node,
                r.leg_a_miles, r.leg_b_miles, r.leg_c_miles, r.total_miles,
                r.access_miles, ev.revenue_total, ev.supply_revenue,
                ev.demand_revenue, ev.capture_cost_total,
                ev.transport_op_total, ev.capex_total, ev.demand_cost_total,
                ev.supply_profit, ev.demand_profit)

    paths = {
        "connections": _write_csv(out / "connections.csv",
                                  _CONNECTION_COLUMNS,
                                  map(connection_row, result.connections)),
        "annual": _write_csv(
            out / "annual.csv", ("year", "mode", "tonnes"),
            ((year, mode.label, tonnes)
             for (year, mode), tonnes in sorted(
                 result.annual_capture.items(),
                 key=lambda kv: (kv[0][0], kv[0][1])))),
    }
    summary_path = out / "summary.json"
    summary_path.write_text(
        json.dumps(summary_dict(result), sort_keys=True, indent=2) + "\n",
        encoding="utf-8")
    paths["summary"] = summary_path
    return paths
