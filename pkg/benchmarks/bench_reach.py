"""Compare the compiled and pure-Python reachability kernels.

    python benchmarks/bench_reach.py [--nodes N] [--degree D] [--repeat R]
"""

import argparse
import random
import statistics
import time
from array import array

from spectrim import _reach


def make_graph(nodes: int, degree: int, seed: int = 0):
    rng = random.Random(seed)
    indptr, indices = array("q", [0]), array("q")
    for _ in range(nodes):
        indices.extend(rng.randrange(nodes) for _ in range(rng.randint(0, 2 * degree)))
        indptr.append(len(indices))
    entries = array("q", rng.sample(range(nodes), min(nodes, 10)))
    return indptr, indices, entries


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--nodes", type=int, nargs="+", default=[10_000, 100_000, 1_000_000])
    parser.add_argument("--degree", type=int, default=3)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    kernels = _reach.available_kernels()
    if "cython" not in kernels:
        print("compiled kernel not built; only the Python fallback is timed")
    print(f"{'nodes':>10} {'edges':>10} " + " ".join(f"{name + ' ms':>12}" for name in kernels) + f" {'speedup':>8}")
    for n in args.nodes:
        graph = make_graph(n, args.degree)
        timings = {}
        results = set()
        for name, kernel in kernels.items():
            runs = []
            for _ in range(args.repeat):
                start = time.perf_counter()
                out = kernel(*graph)
                runs.append(time.perf_counter() - start)
            results.add(bytes(out))
            timings[name] = statistics.median(runs) * 1000
        assert len(results) == 1, "kernels disagree"
        speedup = timings["python"] / timings["cython"] if "cython" in timings else float("nan")
        row = " ".join(f"{timings[name]:>12.2f}" for name in kernels)
        print(f"{n:>10} {len(graph[1]):>10} {row} {speedup:>7.1f}x")


if __name__ == "__main__":
    main()
