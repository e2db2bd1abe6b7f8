# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: batched haversine distances and CSR Dijkstra.

A Python fallback with the same signatures lives in ``_pure``; keep the two
in sync.
"""

from libc.math cimport sin, cos, asin, sqrt, M_PI, INFINITY
from libc.stdlib cimport malloc, free, realloc

cdef double EARTH_RADIUS_MILES = 3958.8
cdef double _DEG = M_PI / 180.0


cdef inline double _hav(double lon1, double lat1, double lon2, double lat2) noexcept nogil:
    cdef double sdp = sin((lat2 - lat1) * _DEG / 2.0)
    cdef double sdl = sin((lon2 - lon1) * _DEG / 2.0)
    cdef double a = sdp * sdp + cos(lat1 * _DEG) * cos(lat2 * _DEG) * sdl * sdl
    if a > 1.0:
        a = 1.0
    return 2.0 * EARTH_RADIUS_MILES * asin(sqrt(a))


def haversine_miles(double lon1, double lat1, double lon2, double lat2):
    """Great-circle distance in miles between two lon/lat points."""
    return _hav(lon1, lat1, lon2, lat2)


def haversine_to_many(double lon, double lat, double[::1] lons, double[::1] lats,
                      double[::1] out):
    """Distances from one point to many; results written into ``out``."""
    cdef Py_ssize_t i, n = lons.shape[0]
    with nogil:
        for i in range(n):
            out[i] = _hav(lon, lat, lons[i], lats[i])


def nearest_available(double lon, double lat, double[::1] lons, double[::1] lats,
                      long long[::1] years, long long year):
    """(index, miles) of the nearest point with years[i] <= year.

    Returns (-1, inf) when nothing is available.  Distance ties keep the
    lowest index.
    """
    cdef Py_ssize_t i, best = -1
    cdef double d, bestd = INFINITY
    cdef Py_ssize_t n = lons.shape[0]
    with nogil:
        for i in range(n):
            if years[i] <= year:
                d = _hav(lon, lat, lons[i], lats[i])
                if d < bestd:
                    bestd = d
                    best = i
    return best, bestd


def dijkstra_csr(int[::1] indptr, int[::1] indices, double[::1] weights,
                 int source, double[::1] dist):
    """Single-source shortest paths on an undirected CSR graph.

    ``dist`` must come in prefilled with +inf except dist[source] = 0; it is
    updated in place.  Binary heap with lazy deletion.
    """
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t cap = 4 * n + 16
    cdef Py_ssize_t size = 0
    cdef double *hd = <double *> malloc(cap * sizeof(double))
    cdef int *hn = <int *> malloc(cap * sizeof(int))
    if hd == NULL or hn == NULL:
        free(hd)
        free(hn)
        raise MemoryError()

    cdef Py_ssize_t i, j, child
    cdef int u, v, k
    cdef double d, nd

    try:
        with nogil:
            hd[0] = 0.0
            hn[0] = source
            size = 1
            while size > 0:
                # pop min
                d = hd[0]
                u = hn[0]
                size -= 1
                hd[0] = hd[size]
                hn[0] = hn[size]
                i = 0
                while True:
                    child = 2 * i + 1
                    if child >= size:
                        break
                    if child + 1 < size and hd[child + 1] < hd[child]:
                        child += 1
                    if hd[child] < hd[i]:
                        hd[i], hd[child] = hd[child], hd[i]
                        hn[i], hn[child] = hn[child], hn[i]
                        i = child
                    else:
                        break
                if d > dist[u]:
                    continue
                for k in range(indptr[u], indptr[u + 1]):
                    v = indices[k]
                    nd = d + weights[k]
                    if nd < dist[v]:
                        dist[v] = nd
                        # push (nd, v), growing storage if needed
                        if size == cap:
                            with gil:
                                cap = cap * 2
                                hd = <double *> realloc(hd, cap * sizeof(double))
                                hn = <int *> realloc(hn, cap * sizeof(int))
                                if hd == NULL or hn == NULL:
                                    raise MemoryError()
                        hd[size] = nd
                        hn[size] = v
                        j = size
                        size += 1
                        while j > 0 and hd[(j - 1) // 2] > hd[j]:
                            hd[(j - 1) // 2], hd[j] = hd[j], hd[(j - 1) // 2]
                            hn[(j - 1) // 2], hn[j] = hn[j], hn[(j - 1) // 2]
                            j = (j - 1) // 2
    finally:
        free(hd)
        free(hn)
