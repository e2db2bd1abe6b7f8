"""Generators: candidate storage sites and synthetic desk-scale scenarios.

``generate_candidate_sinks`` reduces a source inventory to at most
``max_sites`` storage-site candidates: greedy tonnage-weighted clustering,
placement at the nearest network node, and a population screen standing in
for full GIS suitability polygons.

``generate_synthetic_scenario`` fabricates a complete input set (sources,
sinks, three mode networks, scenario file) with uniform placements inside a
bounding box, so every part of the pipeline can be exercised without any
proprietary dataset.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import rng as rngmod
from .dataio import PopulationGrid, write_network, write_sinks, write_sources
from .geo import great_circle_miles
from .network import ModeNetwork, NetworkEdge, NetworkNode
from .scenario import Algorithm, ScenarioConfig, write_scenario
from .types import (ALL_LINE_HAUL, ALWAYS, DemandAgent, DemandCategory,
                    GeoPoint, Mode, SupplyAgent, UNLIMITED,
                    mean_annual_tonnes, source_type_share, SOURCE_TYPES)


@dataclass(frozen=True)
class SinkCandidate:
    """A screened storage-site candidate and its siting criteria."""

    location: GeoPoint
    nearest_network_miles: float
    nearest_cluster_miles: float
    max_population_within_radius: float

    def __post_init__(self):
        for name in ("nearest_network_miles", "nearest_cluster_miles",
                     "max_population_within_radius"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


@dataclass(frozen=True)
class SiteParams:
    cluster_radius_miles: float = 100.0
    pop_radius_miles: float = 30.0
    pop_threshold: float = 25_000.0
    max_sites: int = 120


def _cluster_sources(sources: Sequence[SupplyAgent],
                     radius_miles: float) -> list[tuple[GeoPoint, float]]:
    """Greedy clusters as (centroid location, total annual tonnes).

    Repeatedly promotes the largest unclustered source to centroid and
    absorbs everything within the radius, so cluster order is by
    descending anchor tonnage.
    """
    remaining = sorted(sources, key=lambda s: (-s.annual_tonnes, s.id))
    clusters: list[tuple[GeoPoint, float]] = []
    while remaining:
        anchor = remaining[0]
        absorbed = [s for s in remaining
                    if great_circle_miles(anchor.location, s.location)
                    <= radius_miles]
        total = sum(s.annual_tonnes for s in absorbed)
        clusters.append((anchor.location, total))
        taken = {s.id for s in absorbed}
        remaining = [s for s in remaining if s.id not in taken]
    return clusters


def _nearest_node_any_year(networks: dict[Mode, ModeNetwork],
                           point: GeoPoint) -> Optional[tuple[str, GeoPoint, float]]:
    """Nearest node over the union of all networks, ignoring availability."""
    best = None
    for mode in sorted(networks):
        net = networks[mode]
        for node in net.nodes:
            miles = great_circle_miles(point, node.location)
            key = (miles, node.id)
            if best is None or key < best[0]:
                best = (key, node)
    if best is None:
        return None
    (miles, _), node = best
    return node.id, node.location, miles


def _max_population_near(pop: PopulationGrid, point: GeoPoint,
                         radius_miles: float) -> float:
    worst = 0.0
    for cell in pop:
        if great_circle_miles(point, cell.location) <= radius_miles:
            worst = max(worst, cell.daytime, cell.nighttime)
    return worst


def generate_candidate_sinks(sources: Sequence[SupplyAgent],
                             networks: dict[Mode, ModeNetwork],
                             pop: PopulationGrid,
                             params: Optional[SiteParams] = None,
                             rng=None) -> list[SinkCandidate]:
    """Candidate storage sites near clustered supply and the network.

    The ``rng`` argument is accepted for interface stability; the current
    procedure is fully deterministic and does not draw from it.
    """
    del rng
    params = params or SiteParams()
    if not networks or all(not net.nodes for net in networks.values()):
        raise ValueError("generate_candidate_sinks needs a nonempty network")
    clusters = _cluster_sources(sources, params.cluster_radius_miles)
    centroids = [c for c, _ in clusters]

    picked: dict[str, tuple[float, float, SinkCandidate]] = {}
    for centroid, tonnes in clusters:
        found = _nearest_node_any_year(networks, centroid)
        if found is None:
            continue
        node_id, node_loc, _ = found
        if node_id in picked:
            continue  # an earlier (larger) cluster already claimed this node
        population = _max_population_near(pop, node_loc,
                                          params.pop_radius_miles)
        if population > params.pop_threshold:
            continue
        nearest_cluster = min(great_circle_miles(node_loc, c)
                              for c in centroids)
        candidate = SinkCandidate(
            location=node_loc,
            nearest_network_miles=0.0,  # placed exactly at a network node
            nearest_cluster_miles=nearest_cluster,
            max_population_within_radius=population)
        picked[node_id] = (population, -tonnes, candidate)

    ranked = sorted(picked.items(), key=lambda kv: (kv[1][0], kv[1][1], kv[0]))
    return [cand for _, (_, _, cand) in ranked[:params.max_sites]]


def write_sites(candidates: Sequence[SinkCandidate], path) -> Path:
    """Candidate sites as CSV, one row per candidate in rank order."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("lon", "lat", "nearest_network_miles",
                         "nearest_cluster_miles",
                         "max_population_within_radius"))
        for c in candidates:
            writer.writerow([repr(float(v)) for v in
                             (c.location.lon, c.location.lat,
                              c.nearest_network_miles,
                              c.nearest_cluster_miles,
                              c.max_population_within_radius)])
    return path


# ---------------------------------------------------------------------------
# Synthetic scenarios


@dataclass(frozen=True)
class GenParams:
    n_sources: int = 60
    n_sinks: int = 12
    #: (lon_lo, lat_lo, lon_hi, lat_hi)
    bbox: tuple[float, float, float, float] = (-98.0, 29.0, -80.0, 41.0)
    type_mix: Optional[dict[str, float]] = None
    seed: int = 0
    n_rail_nodes: int = 14
    water_grid: tuple[int, int] = (4, 3)
    n_pipeline_nodes: int = 16
    first_year: int = 2025

    def __post_init__(self):
        lon_lo, lat_lo, lon_hi, lat_hi = self.bbox
        if not (lon_lo < lon_hi and lat_lo < lat_hi):
            raise ValueError(f"degenerate bbox {self.bbox}")
        if self.n_sources < 0 or self.n_sinks < 0:
            raise ValueError("n_sources and n_sinks must be >= 0")


def _default_type_mix() -> dict[str, float]:
    return {name: source_type_share(name) for name in SOURCE_TYPES}


def _uniform_points(stream, params: GenParams, n: int) -> list[GeoPoint]:
    lon_lo, lat_lo, lon_hi, lat_hi = params.bbox
    lons = stream.uniform(lon_lo, lon_hi, size=n)
    lats = stream.uniform(lat_lo, lat_hi, size=n)
    return [GeoPoint(float(lon), float(lat)) for lon, lat in zip(lons, lats)]


def _make_sources(params: GenParams) -> list[SupplyAgent]:
    stream = rngmod.substream(params.seed, "generator", "sources")
    mix = params.type_mix or _default_type_mix()
    names = sorted(mix)
    weights = np.array([mix[n] for n in names], dtype=float)
    if not np.all(weights >= 0) or weights.sum() <= 0:
        raise ValueError("type_mix weights must be nonnegative and not all zero")
    weights = weights / weights.sum()
    points = _uniform_points(stream, params, params.n_sources)
    kinds = stream.choice(len(names), size=params.n_sources, p=weights)
    sizes = stream.uniform(0.5, 1.5, size=params.n_sources)
    sources = []
    for i in range(params.n_sources):
        name = names[int(kinds[i])]
        tonnes = mean_annual_tonnes(name) * float(sizes[i])
        sources.append(SupplyAgent(
            id=f"S{i + 1}", source_type=name, location=points[i],
            annual_tonnes=round(tonnes, 1)))
    return sources


_UTILIZATION_TYPES = ("EOR", "Urea", "Food and Beverage", "Other CCU")


def _make_sinks(params: GenParams) -> list[DemandAgent]:
    stream = rngmod.substream(params.seed, "generator", "sinks")
    points = _uniform_points(stream, params, params.n_sinks)
    util_costs = stream.uniform(3.0, 8.0, size=params.n_sinks)
    sinks = []
    for i in range(params.n_sinks):
        sink_id = f"D{i + 1}"
        if i % 10 < 7:
            category = DemandCategory.STORAGE
            sink_type = "Saline Aquifer"
            cost = 10.0
            modes = ALL_LINE_HAUL
        else:
            category = DemandCategory.UTILIZATION
            sink_type = _UTILIZATION_TYPES[i % len(_UTILIZATION_TYPES)]
            cost = round(float(util_costs[i]), 2)
            modes = ALL_LINE_HAUL
            if sink_type == "Food and Beverage":
                modes = modes - {Mode.PIPELINE}
        annual = UNLIMITED
        total = UNLIMITED
        if i % 4 == 3:
            annual = 2_000_000.0
            total = annual * 25
        available = ALWAYS if i % 5 else params.first_year + 3
        end_year = params.first_year + 30 if i % 7 == 6 else None
        sinks.append(DemandAgent(
            id=sink_id, category=category, sink_type=sink_type,
            location=points[i], cost_per_tonne=cost, annual_capacity=annual,
            total_capacity=total, available_year=available,
            end_year=end_year, allowed_modes=modes))
    return sinks


def _tree_edges(stream, node_ids: list[str],
                years: Optional[list[int]] = None,
                extra: int = 0) -> list[NetworkEdge]:
    """A random connected tree plus optional extra chords."""
    edges = []
    n = len(node_ids)
    for i in range(1, n):
        j = int(stream.integers(0, i))
        year = ALWAYS if years is None else max(years[i], years[j])
        edges.append(NetworkEdge(node_ids[j], node_ids[i], None, year))
    for _ in range(extra):
        if n < 3:
            break
        i, j = (int(x) for x in stream.choice(n, size=2, replace=False))
        year = ALWAYS if years is None else max(years[i], years[j])
        edges.append(NetworkEdge(node_ids[min(i, j)], node_ids[max(i, j)],
                                 None, year))
    return edges


def _make_rail(params: GenParams) -> ModeNetwork:
    stream = rngmod.substream(params.seed, "generator", "rail")
    n = max(2, params.n_rail_nodes)
    points = _uniform_points(stream, params, n)
    nodes = [NetworkNode(f"R{i + 1}", points[i]) for i in range(n)]
    edges = _tree_edges(stream, [nd.id for nd in nodes], extra=n // 4)
    return ModeNetwork(Mode.RAIL, nodes, edges)


def _make_water(params: GenParams) -> ModeNetwork:
    lon_lo, lat_lo, lon_hi, lat_hi = params.bbox
    w, h = params.water_grid
    w, h = max(2, w), max(2, h)
    nodes = []
    for r in range(h):
        for c in range(w):
            lon = lon_lo + (lon_hi - lon_lo) * (c + 0.5) / w
            lat = lat_lo + (lat_hi - lat_lo) * (r + 0.5) / h
            nodes.append(NetworkNode(f"W{r * w + c + 1}",
                                     GeoPoint(lon, lat)))
    edges = []
    for r in range(h):
        for c in range(w):
            here = f"W{r * w + c + 1}"
            if c + 1 < w:
                edges.append(NetworkEdge(here, f"W{r * w + c + 2}"))
            if r + 1 < h:
                edges.append(NetworkEdge(here, f"W{(r + 1) * w + c + 1}"))
    return ModeNetwork(Mode.WATER, nodes, edges)


def _make_pipeline(params: GenParams) -> ModeNetwork:
    stream = rngmod.substream(params.seed, "generator", "pipeline")
    n = max(2, params.n_pipeline_nodes)
    points = _uniform_points(stream, params, n)
    stages = stream.choice([0, 5, 10], size=n, p=[0.5, 0.3, 0.2])
    years = [ALWAYS if s == 0 else params.first_year + int(s) for s in stages]
    if all(y != ALWAYS for y in years):
        years[0] = ALWAYS  # keep at least one node buildable from the start
    nodes = [NetworkNode(f"P{i + 1}", points[i], years[i])
             for i in range(n)]
    edges = _tree_edges(stream, [nd.id for nd in nodes], years=years,
                        extra=n // 5)
    return ModeNetwork(Mode.PIPELINE, nodes, edges)


def generate_synthetic_scenario(params: GenParams, out_dir) -> dict[str, Path]:
    """Write a complete runnable scenario under out_dir.

    Emits sources.csv, sinks.csv, the six network CSVs, and scenario.txt;
    re-running with the same params produces byte-identical files.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    sources = _make_sources(params)
    sinks = _make_sinks(params)
    networks = {Mode.PIPELINE: _make_pipeline(params),
                Mode.RAIL: _make_rail(params),
                Mode.WATER: _make_water(params)}

    paths: dict[str, Path] = {}
    paths["sources"] = write_sources(sources, out / "sources.csv")
    paths["sinks"] = write_sinks(sinks, out / "sinks.csv")
    for mode, net in networks.items():
        stem = mode.name.lower()
        node_path, edge_path = write_network(
            net.nodes, net.edges,
            out / f"{stem}_nodes.csv", out / f"{stem}_edges.csv")
        paths[f"{stem}_nodes"] = node_path
        paths[f"{stem}_edges"] = edge_path

    cfg = ScenarioConfig(first_year=params.first_year,
                         last_admission_year=params.first_year + 7,
                         horizon_end=params.first_year + 18,
                         algorithm=Algorithm.MPFY,
                         seed=params.seed, base_dir=str(out))
    scenario_path = out / "scenario.txt"
    write_scenario(cfg, scenario_path)
    paths["scenario"] = scenario_path
    return paths
