"""Compare the compiled and pure-Python kernels on synthetic graphs.

    python benchmarks/bench_kernels.py [--n 2000 5000] [--radius 2] [--repeat 3]

Prints one JSON object per (kernel, graph) pair with best-of-repeat wall times
and whether both backends produced bit-identical output.
"""
import argparse
import json
import sys
import time

import numpy as np

from egospectral import _backend
from egospectral.harness import generate_synthetic


def best_time(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_graph(g, radius, repeat, python_max_n):
    cases = {
        "egonet_walk_sums": lambda k: k.egonet_walk_sums(g.indptr, g.indices, g.weights, radius, 2 * radius + 1,
                                                          0, g.n),
        "triangle_count": lambda k: k.triangle_count(g.indptr, g.indices),
    }
    results = []
    for name, call in cases.items():
        row = {"kernel": name, "n": g.n, "edges": g.num_edges, "radius": radius}
        outs = {}
        for backend, kern in sorted(_backend.BACKENDS.items()):
            if backend == "python" and g.n > python_max_n:
                row["python_s"] = None
                continue
            row[f"{backend}_s"], outs[backend] = best_time(lambda: call(kern), repeat)
        if len(outs) == 2:
            row["speedup"] = row["python_s"] / row["compiled_s"]
            row["bit_identical"] = bool(np.array_equal(outs["python"], outs["compiled"]))
        results.append(row)
    return results


def bench_jacobi(sizes, repeat):
    rng = np.random.default_rng(0)
    results = []
    for k in sizes:
        b = rng.normal(size=(k, k))
        a = b + b.T
        row = {"kernel": "jacobi_sweeps", "n": k}
        for backend, kern in sorted(_backend.BACKENDS.items()):
            row[f"{backend}_s"], _ = best_time(lambda: kern.jacobi_sweeps(a.copy(), 1e-15, 100), repeat)
        if "compiled_s" in row:
            row["speedup"] = row["python_s"] / row["compiled_s"]
        results.append(row)
    return results


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, nargs="+", default=[500, 2000])
    p.add_argument("--edges-per-node", type=int, default=4)
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--python-max-n", type=int, default=5000, help="skip the slow backend above this size")
    p.add_argument("--jacobi", type=int, nargs="*", default=[20, 60])
    args = p.parse_args(argv)

    if "compiled" not in _backend.BACKENDS:
        print("compiled extension not available; timing the fallback only", file=sys.stderr)
    for n in args.n:
        g = generate_synthetic({"kind": "preferential_attachment", "n": n, "edges_per_node": args.edges_per_node}, 0)
        for row in bench_graph(g, args.radius, args.repeat, args.python_max_n):
            print(json.dumps(row))
    for row in bench_jacobi(args.jacobi, args.repeat):
        print(json.dumps(row))


if __name__ == "__main__":
    main()
