"""Benchmark the compiled kernels against the pure-Python fallback.

Times the three hot kernels (scalar haversine, one-to-many haversine,
CSR Dijkstra) under every available implementation and prints a small
table with the speedup of each over "pure".

Usage: python3 benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import math
import time

import numpy as np

from carbonflow._kernels import implementations


def bench(fn, repeats: int) -> float:
    best = math.inf
    for _ in range(repeats):
        started = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - started)
    return best


def random_csr(rng, n_nodes: int, n_edges: int):
    adj = [[] for _ in range(n_nodes)]
    for _ in range(n_edges):
        a, b = rng.choice(n_nodes, size=2, replace=False)
        w = float(rng.uniform(1.0, 500.0))
        adj[a].append((b, w))
        adj[b].append((a, w))
    indptr = np.zeros(n_nodes + 1, dtype=np.int32)
    indices, weights = [], []
    for i, row in enumerate(adj):
        indptr[i + 1] = indptr[i] + len(row)
        for j, w in row:
            indices.append(j)
            weights.append(w)
    return (indptr, np.array(indices, dtype=np.int32),
            np.array(weights, dtype=np.float64))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repeats per case (best is kept)")
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    lons = rng.uniform(-180.0, 180.0, 200_000)
    lats = rng.uniform(-90.0, 90.0, 200_000)
    pairs = rng.uniform(-90.0, 90.0, (20_000, 4))
    indptr, indices, weights = random_csr(rng, 3_000, 12_000)

    impls = implementations()

    def scalar_case(impl):
        def run():
            total = 0.0
            for lon1, lat1, lon2, lat2 in pairs:
                total += impl.haversine_miles(lon1, lat1, lon2, lat2)
            return total
        return run

    def many_case(impl):
        out = np.empty(len(lons))
        origin_lon, origin_lat = -87.6, 41.9

        def run():
            impl.haversine_to_many(origin_lon, origin_lat, lons, lats, out)
        return run

    def dijkstra_case(impl):
        def run():
            dist = np.full(3_000, np.inf)
            dist[0] = 0.0
            impl.dijkstra_csr(indptr, indices, weights, 0, dist)
        return run

    cases = {
        f"haversine scalar x{len(pairs):,}": scalar_case,
        f"haversine to-many x{len(lons):,}": many_case,
        "dijkstra 3,000 nodes": dijkstra_case,
    }

    print(f"implementations: {', '.join(impls)}")
    print(f"{'case':<28} " + " ".join(f"{name:>12}" for name in impls)
          + "   speedup")
    for label, make in cases.items():
        timings = {name: bench(make(impl), args.repeats)
                   for name, impl in impls.items()}
        cells = " ".join(f"{timings[name] * 1e3:>10.2f}ms" for name in impls)
        if "compiled" in timings:
            ratio = timings["pure"] / timings["compiled"]
            print(f"{label:<28} {cells}   {ratio:>6.1f}x")
        else:
            print(f"{label:<28} {cells}   (compiled kernels not built)")


if __name__ == "__main__":
    main()
