"""Compare the compiled and numpy mask-scan backends on Čech-style boxes.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import time

import numpy as np

from toricdk import kernels


def system(dim, rows, seed):
    rng = np.random.default_rng(seed)
    G = rng.integers(-3, 4, size=(rows, dim)).tolist()
    h = rng.integers(-4, 5, size=rows).tolist()
    return G, h


CASES = [(2, 4, 200), (3, 5, 40), (3, 8, 40), (4, 6, 14)]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    backends = ["python"] + (["cython"] if kernels._compiled is not None else [])
    print(f"{'dim':>3} {'rows':>4} {'points':>10} " + " ".join(f"{b:>10}" for b in backends))
    for dim, rows, radius in CASES:
        G, h = system(dim, rows, dim * 100 + rows)
        lo, hi = [-radius] * dim, [radius] * dim
        timings = []
        reference = None
        for backend in backends:
            best = float("inf")
            for _ in range(args.repeat):
                start = time.perf_counter()
                out = kernels.mask_scan(G, h, lo, hi, backend)
                best = min(best, time.perf_counter() - start)
            if reference is None:
                reference = out
            else:
                assert all(np.array_equal(x, y) for x, y in zip(reference, out)), "backends disagree"
            timings.append(best)
        points = (2 * radius + 1) ** dim
        print(f"{dim:>3} {rows:>4} {points:>10} " + " ".join(f"{t:>9.3f}s" for t in timings))


if __name__ == "__main__":
    main()
