"""Compare the compiled and pure-Python schedule interpreters.

    python benchmarks/bench_kernel.py [--repeat N]

Each case compiles one counting schedule and runs it on every available
backend; counts must agree exactly.
"""

import argparse
import time

from primbounds.antichains import CountKind, _schedule
from primbounds.kernel import available_backends, run_schedule
from primbounds.lattice import first_primes, generate_lattice

CASES = [
    (2, CountKind.AllAll, 100_000),
    (3, CountKind.MaxTruncated, 20_000),
    (3, CountKind.AllTruncated, 50_000),
    (4, CountKind.MaxAll, 2_695),
    (5, CountKind.AllTruncated, 98),
    (5, CountKind.MaxTruncated, 1_000),
]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = available_backends()
    print(f"{'case':<28}{'elems':>6}  " + "".join(f"{b:>12}" for b in backends) + "   speedup")
    for l, kind, i in CASES:
        lat = generate_lattice(first_primes(l), i)
        steps = _schedule(lat, kind, i)
        times, counts = {}, set()
        for b in backends:
            best = float("inf")
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                counts.add(run_schedule(steps, backend=b))
                best = min(best, time.perf_counter() - t0)
            times[b] = best
        assert len(counts) == 1, f"backends disagree on {kind.name} l={l} i={i}"
        label = f"{kind.name} l={l} i={i}"
        row = "".join(f"{times[b] * 1e3:>10.2f}ms" for b in backends)
        speed = (f"{times['python'] / times['compiled']:>9.1f}x"
                 if "compiled" in times else "       n/a")
        print(f"{label:<28}{len(lat.elements):>6}  {row}{speed}")


if __name__ == "__main__":
    main()
