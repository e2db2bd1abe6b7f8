"""Python fallback for the compiled kernels.

Same call signatures as ``_speedups``; haversine batches are vectorized with
numpy, Dijkstra runs on heapq.  Used when the extension is not built or when
CARBONFLOW_PURE=1 is set.
"""

import heapq
import math

import numpy as np

EARTH_RADIUS_MILES = 3958.8
_DEG = math.pi / 180.0


def haversine_miles(lon1, lat1, lon2, lat2):
    """Great-circle distance in miles between two lon/lat points.

    Routed through the batch path so scalar and vectorized calls produce
    bit-identical values (numpy's sin/asin differ from libm by ULPs).
    """
    out = np.empty(1)
    haversine_to_many(lon1, lat1, np.array([lon2]), np.array([lat2]), out)
    return float(out[0])


def haversine_to_many(lon, lat, lons, lats, out):
    """Distances from one point to many; results written into ``out``."""
    sdp = np.sin((lats - lat) * (_DEG / 2.0))
    sdl = np.sin((lons - lon) * (_DEG / 2.0))
    a = sdp * sdp + math.cos(lat * _DEG) * np.cos(lats * _DEG) * sdl * sdl
    np.clip(a, 0.0, 1.0, out=a)
    np.copyto(out, 2.0 * EARTH_RADIUS_MILES * np.arcsin(np.sqrt(a)))


def nearest_available(lon, lat, lons, lats, years, year):
    """(index, miles) of the nearest point with years[i] <= year.

    Returns (-1, inf) when nothing is available.  Distance ties keep the
    lowest index.
    """
    mask = years <= year
    if not mask.any():
        return -1, math.inf
    d = np.empty(len(lons))
    haversine_to_many(lon, lat, lons, lats, d)
    d[~mask] = math.inf
    i = int(np.argmin(d))
    return i, float(d[i])


def dijkstra_csr(indptr, indices, weights, source, dist):
    """Single-source shortest paths on an undirected CSR graph.

    ``dist`` must come in prefilled with +inf except dist[source] = 0; it is
    updated in place.
    """
    heap = [(0.0, int(source))]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for k in range(indptr[u], indptr[u + 1]):
            v = int(indices[k])
            nd = d + weights[k]
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
