"""Transport networks: nodes and edges with build-out years.

Each line-haul mode owns one ModeNetwork.  Elements carry an
``available_year``; the network as seen in simulation year y contains
exactly the nodes and edges whose available_year <= y.  Distinct
availability years form the network's *epochs*: within an epoch the graph
is static, so shortest-path distance vectors are computed once per
(epoch, source) and cached.

Edges may carry an explicit positive length; when omitted, the length is
the great-circle distance between the endpoint nodes.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from . import _kernels
from .types import ALWAYS, GeoPoint, Mode


@dataclass(frozen=True)
class NetworkNode:
    id: str
    location: GeoPoint
    available_year: int = ALWAYS


@dataclass(frozen=True)
class NetworkEdge:
    node_a: str
    node_b: str
    miles: Optional[float] = None
    available_year: int = ALWAYS

    def __post_init__(self):
        if self.miles is not None and not self.miles > 0:
            raise ValueError(
                f"edge ({self.node_a}, {self.node_b}): explicit miles must be > 0")


class ModeNetwork:
    """One transport mode's undirected graph, queryable at any year.

    Nodes are held in lexicographic id order, which makes every
    lowest-index tie-break equivalent to the documented
    smallest-node-id rule.
    """

    def __init__(self, mode: Mode, nodes: Iterable[NetworkNode],
                 edges: Iterable[NetworkEdge]):
        self.mode = mode
        ordered = sorted(nodes, key=lambda n: n.id)
        ids = [n.id for n in ordered]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValueError(f"duplicate node ids in {mode.label} network: {dupes}")
        self._nodes = {n.id: n for n in ordered}
        self._index = {n.id: i for i, n in enumerate(ordered)}
        self.node_ids: list[str] = ids
        self.lons = np.array([n.location.lon for n in ordered], dtype=np.float64)
        self.lats = np.array([n.location.lat for n in ordered], dtype=np.float64)
        self.node_years = np.array([n.available_year for n in ordered],
                                   dtype=np.int64)

        self._edges: list[tuple[int, int, int, float]] = []  # (ia, ib, year, miles)
        years = set(self.node_years.tolist())
        for e in edges:
            if e.node_a not in self._index or e.node_b not in self._index:
                missing = e.node_a if e.node_a not in self._index else e.node_b
                raise ValueError(
                    f"edge ({e.node_a}, {e.node_b}) in {mode.label} network "
                    f"references unknown node {missing!r}")
            if e.node_a == e.node_b:
                continue
            ia, ib = self._index[e.node_a], self._index[e.node_b]
            miles = e.miles if e.miles is not None else _kernels.haversine_miles(
                self.lons[ia], self.lats[ia], self.lons[ib], self.lats[ib])
            self._edges.append((ia, ib, e.available_year, miles))
            years.add(e.available_year)

        self.epochs: tuple[int, ...] = tuple(sorted(years)) if ordered else ()
        self._csr_cache: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}
        self._dist_cache: dict[tuple[int, int], np.ndarray] = {}

    @property
    def node_count(self) -> int:
        return len(self._nodes)

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    @property
    def nodes(self) -> list[NetworkNode]:
        """All nodes in id order."""
        return [self._nodes[i] for i in self.node_ids]

    @property
    def edges(self) -> list[NetworkEdge]:
        """All edges with resolved mileages (self-loops dropped)."""
        return [NetworkEdge(self.node_ids[ia], self.node_ids[ib], miles, year)
                for ia, ib, year, miles in self._edges]

    def has_node(self, node_id: str) -> bool:
        return node_id in self._nodes

    def node(self, node_id: str) -> NetworkNode:
        return self._nodes[node_id]

    def index_of(self, node_id: str) -> int:
        return self._index[node_id]

    def epoch_for(self, year: int) -> Optional[int]:
        """Latest epoch <= year, or None if nothing is built yet."""
        if not self.epochs or year < self.epochs[0]:
            return None
        return self.epochs[bisect.bisect_right(self.epochs, year) - 1]

    def available_node_ids(self, year: int) -> list[str]:
        return [i for i, ok in zip(self.node_ids, self.node_years <= year) if ok]

    def nearest_node(self, point: GeoPoint, year: int) -> Optional[tuple[str, float]]:
        """(node_id, miles) of the closest node available by ``year``.

        Ties go to the lexicographically smallest id.  None when nothing
        is available yet.
        """
        idx, miles = _kernels.nearest_available(
            point.lon, point.lat, self.lons, self.lats, self.node_years, year)
        if idx < 0:
            return None
        return self.node_ids[idx], miles

    def _csr(self, epoch: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        cached = self._csr_cache.get(epoch)
        if cached is not None:
            return cached
        n = self.node_count
        node_ok = self.node_years <= epoch
        half: list[tuple[int, int, float]] = []
        for ia, ib, year, miles in self._edges:
            if year <= epoch and node_ok[ia] and node_ok[ib]:
                half.append((ia, ib, miles))
                half.append((ib, ia, miles))
        counts = np.zeros(n, dtype=np.int32)
        for ia, _, _ in half:
            counts[ia] += 1
        indptr = np.zeros(n + 1, dtype=np.int32)  # kernel contract: int32 CSR
        np.cumsum(counts, out=indptr[1:])
        indices = np.zeros(len(half), dtype=np.int32)
        weights = np.zeros(len(half), dtype=np.float64)
        cursor = indptr[:-1].copy()
        for ia, ib, miles in half:
            k = cursor[ia]
            indices[k] = ib
            weights[k] = miles
            cursor[ia] = k + 1
        csr = (indptr, indices, weights)
        self._csr_cache[epoch] = csr
        return csr

    def distances_from(self, node_id: str, year: int) -> Optional[np.ndarray]:
        """Shortest-path miles from node_id to every node (id-sorted order).

        Unreachable or not-yet-built targets hold inf.  None when the
        source itself is missing or not available by ``year``.  The result
        is a shared read-only cache entry.
        """
        node = self._nodes.get(node_id)
        if node is None or node.available_year > year:
            return None
        epoch = self.epoch_for(year)
        if epoch is None:
            return None
        src = self._index[node_id]
        key = (epoch, src)
        dist = self._dist_cache.get(key)
        if dist is None:
            indptr, indices, weights = self._csr(epoch)
            dist = _kernels.shortest_dists(indptr, indices, weights, src,
                                           self.node_count)
            dist.setflags(write=False)
            self._dist_cache[key] = dist
        return dist

    def shortest_path_miles(self, a: str, b: str, year: int) -> float:
        """Network distance a->b over elements available by ``year``.

        Unknown ids raise KeyError; an unbuilt or disconnected pair
        returns inf.
        """
        ib = self._index[b]  # KeyError on unknown id, per contract
        self._index[a]
        if self._nodes[b].available_year > year:
            return float("inf")
        dist = self.distances_from(a, year)
        if dist is None:
            return float("inf")
        return float(dist[ib])
