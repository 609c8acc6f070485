"""Benchmark: compiled vs pure-Python reachability kernels.

Builds a layered DAG shaped like a large provenance graph (sources feed
reasoning layers feeding claims), then times backward closures from
random claims on identical CSR inputs for every available backend.

Usage: python benchmarks/bench_kernels.py [--nodes 200000] [--queries 200]
"""

import argparse
import random
import time

import numpy as np

from claimtrace.kernels import available_backends


def layered_dag(rng: random.Random, n_nodes: int, avg_degree: int = 3):
    """Reverse-adjacency CSR for a layered DAG plus its sink layer."""
    n_layers = 12
    layer_of = sorted(rng.randrange(n_layers) for _ in range(n_nodes))
    by_layer = {}
    for idx, layer in enumerate(layer_of):
        by_layer.setdefault(layer, []).append(idx)
    preds = [[] for _ in range(n_nodes)]
    for layer in range(1, n_layers):
        pool = []
        for lower in range(layer):
            pool.extend(by_layer.get(lower, ()))
        if not pool:
            continue
        for node in by_layer.get(layer, ()):
            for _ in range(rng.randint(1, avg_degree * 2 - 1)):
                preds[node].append(rng.choice(pool))
    indptr = np.zeros(n_nodes + 1, dtype=np.int32)
    indptr[1:] = np.cumsum([len(p) for p in preds])
    indices = np.empty(int(indptr[-1]), dtype=np.int32)
    for node, plist in enumerate(preds):
        start = int(indptr[node])
        indices[start : start + len(plist)] = plist
    sinks = by_layer.get(max(by_layer), list(range(n_nodes)))
    return indptr, indices, sinks


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--nodes", type=int, default=200_000)
    parser.add_argument("--queries", type=int, default=200)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    indptr, indices, sinks = layered_dag(rng, args.nodes)
    starts = [rng.choice(sinks) for _ in range(args.queries)]
    print(
        f"layered DAG: {args.nodes} nodes, {len(indices)} edges, "
        f"{args.queries} backward-closure queries"
    )

    backends = available_backends()
    timings = {}
    checksums = {}
    for name, impl in sorted(backends.items()):
        begin = time.perf_counter()
        total = 0
        for start in starts:
            total += int(impl.closure(indptr, indices, start).sum())
        timings[name] = time.perf_counter() - begin
        checksums[name] = total

    if len(set(checksums.values())) != 1:
        print(f"BACKEND MISMATCH: {checksums}")
        return 1

    baseline = timings.get("python")
    print(f"{'backend':<10} {'total s':>10} {'per query ms':>14} {'speedup':>9}")
    for name, seconds in sorted(timings.items()):
        per_query = seconds / args.queries * 1000
        speedup = f"{baseline / seconds:6.1f}x" if baseline else "      -"
        print(f"{name:<10} {seconds:>10.3f} {per_query:>14.3f} {speedup:>9}")
    if "cython" not in backends:
        print("note: compiled backend not built; install with Cython available")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
