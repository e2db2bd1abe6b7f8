"""Hot-loop kernels with a compiled core and a Python fallback.

The Cython build (``_speedups``) is preferred when importable; otherwise the
numpy/heapq fallback (``_pure``) is used.  CARBONFLOW_PURE=1 forces the
fallback, which is also what ``benchmarks/bench_kernels.py`` exploits to
compare the two.
"""

import os

import numpy as np

from . import _pure

if os.environ.get("CARBONFLOW_PURE") == "1":
    _impl = _pure
    IMPLEMENTATION = "pure"
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]

        IMPLEMENTATION = "compiled"
    except ImportError:
        _impl = _pure
        IMPLEMENTATION = "pure"

EARTH_RADIUS_MILES = _pure.EARTH_RADIUS_MILES

haversine_miles = _impl.haversine_miles
nearest_available = _impl.nearest_available


def haversine_many(lon, lat, lons, lats):
    """Array of great-circle miles from one point to many."""
    out = np.empty(len(lons))
    _impl.haversine_to_many(float(lon), float(lat), lons, lats, out)
    return out


def shortest_dists(indptr, indices, weights, source, n):
    """Distance vector of single-source shortest paths over a CSR graph."""
    dist = np.full(n, np.inf)
    dist[source] = 0.0
    _impl.dijkstra_csr(indptr, indices, weights, source, dist)
    return dist


def implementations():
    """Both kernel implementations, keyed by name (for the benchmark)."""
    impls = {"pure": _pure}
    try:
        from . import _speedups

        impls["compiled"] = _speedups
    except ImportError:
        pass
    return impls
