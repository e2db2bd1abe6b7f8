"""Pure and compiled kernels must agree exactly."""

import numpy as np
import pytest

from carbonflow import _kernels
from carbonflow._kernels import _pure
from oracles import bellman_ford, haversine_reference


def _impls():
    return list(_kernels.implementations().items())


@pytest.mark.parametrize("name,impl", _impls())
def test_haversine_against_reference(name, impl):
    rng = np.random.default_rng(11)
    for _ in range(200):
        lon1, lon2 = rng.uniform(-180, 180, 2)
        lat1, lat2 = rng.uniform(-90, 90, 2)
        got = impl.haversine_miles(lon1, lat1, lon2, lat2)
        assert got == pytest.approx(haversine_reference(lon1, lat1, lon2, lat2),
                                    rel=1e-9, abs=1e-9)


def test_implementations_agree_to_a_few_ulps():
    # libm and numpy trig differ in the last bits, so not bitwise across impls
    impls = _kernels.implementations()
    if len(impls) < 2:
        pytest.skip("compiled kernels not built")
    rng = np.random.default_rng(3)
    lons = rng.uniform(-180, 180, 500)
    lats = rng.uniform(-90, 90, 500)
    out_a = np.empty(500)
    out_b = np.empty(500)
    impls["pure"].haversine_to_many(-90.0, 42.0, lons, lats, out_a)
    impls["compiled"].haversine_to_many(-90.0, 42.0, lons, lats, out_b)
    np.testing.assert_allclose(out_a, out_b, rtol=1e-12, atol=1e-9)


@pytest.mark.parametrize("name,impl", _impls())
def test_scalar_matches_batch_within_implementation(name, impl):
    # the simulation mixes both paths, so they must agree bit for bit
    rng = np.random.default_rng(5)
    lons = rng.uniform(-180, 180, 300)
    lats = rng.uniform(-90, 90, 300)
    out = np.empty(300)
    impl.haversine_to_many(-88.25, 41.5, lons, lats, out)
    for i in range(300):
        assert impl.haversine_miles(-88.25, 41.5, lons[i], lats[i]) == out[i]


@pytest.mark.parametrize("name,impl", _impls())
def test_nearest_available_filters_and_breaks_ties(name, impl):
    lons = np.array([0.0, 1.0, 0.0, 0.0])
    lats = np.array([0.0, 0.0, 0.0, 2.0])
    years = np.array([2030, 2025, 2025, 2025], dtype=np.int64)
    # index 0 coincides but is unavailable; index 2 ties at 0 distance
    idx, miles = impl.nearest_available(0.0, 0.0, lons, lats, years, 2026)
    assert idx == 2
    assert miles == 0.0
    idx, miles = impl.nearest_available(0.0, 0.0, lons, lats, years, 2035)
    assert idx == 0  # ties keep the lowest index
    idx, miles = impl.nearest_available(0.0, 0.0, lons, lats, years, 2020)
    assert idx == -1
    assert miles == np.inf


@pytest.mark.parametrize("name,impl", _impls())
def test_dijkstra_against_bellman_ford(name, impl):
    rng = np.random.default_rng(7)
    for _ in range(30):
        n = int(rng.integers(2, 12))
        m = int(rng.integers(1, n * 2))
        edges = []
        for _ in range(m):
            a, b = rng.integers(0, n, 2)
            if a == b:
                continue
            edges.append((int(a), int(b), float(rng.uniform(0.5, 10))))
        # CSR of the undirected graph
        half = [(a, b, w) for a, b, w in edges] + [(b, a, w) for a, b, w in edges]
        counts = np.zeros(n, dtype=np.int32)
        for a, _, _ in half:
            counts[a] += 1
        indptr = np.zeros(n + 1, dtype=np.int32)
        np.cumsum(counts, out=indptr[1:])
        indices = np.zeros(len(half), dtype=np.int32)
        weights = np.zeros(len(half))
        cursor = indptr[:-1].copy()
        for a, b, w in half:
            indices[cursor[a]] = b
            weights[cursor[a]] = w
            cursor[a] += 1

        src = int(rng.integers(0, n))
        dist = np.full(n, np.inf)
        dist[src] = 0.0
        impl.dijkstra_csr(indptr, indices, weights, src, dist)
        want = bellman_ford(n, edges, src)
        assert dist == pytest.approx(want, rel=1e-12)


def test_pure_is_always_available():
    assert _pure.haversine_miles(0, 0, 0, 0) == 0.0
    assert _kernels.IMPLEMENTATION in ("pure", "compiled")
