"""Time the compiled kernel against the pure-numpy loop.

Run as:  python3 benchmarks/compare_backends.py

Each workload is a fixed set of seeds, so both backends execute exactly
the same simulations; differential tests guarantee identical outputs,
this script only measures wall time. Expect the gap to widen on the
growth workload, where per-iteration distance work dominates and the
Python loop pays its interpreter overhead per edit rather than per run.
"""

import time

import coevo
from coevo import Params, run_simulation, use_backend
from coevo.backend import HAS_NUMBA

WORKLOADS = [
    (
        "collapse (0.01, 0.01), g2000, 30 runs",
        [Params(eta=0.01, lam=0.01, seed=s, max_generations=2_000)
         for s in range(30)],
    ),
    (
        "plateau walk (0.99, 0.99), g2000, 10 runs",
        [Params(eta=0.99, lam=0.99, seed=s, max_generations=2_000)
         for s in range(10)],
    ),
    (
        # seeds chosen so every run ratchets up to the cap instead of
        # dying early, which is the regime this row is meant to price
        "growth to the C=200 cap, (0.8, 0.8), 6 runs",
        [Params(eta=0.8, lam=0.8, seed=s, max_generations=5_000,
                max_complexity=200) for s in (13, 14, 27, 36, 49, 53)],
    ),
    (
        "multiword start C=120, (0.5, 0.5), g400, 6 runs",
        [Params(eta=0.5, lam=0.5, seed=s, max_generations=400,
                init_complexity=120) for s in range(6)],
    ),
]


def time_backend(name, batch, repeats=3):
    best = float("inf")
    with use_backend(name):
        for _ in range(repeats):
            t0 = time.perf_counter()
            for params in batch:
                run_simulation(params, thin=1_000)
            best = min(best, time.perf_counter() - t0)
    return best


def main():
    if not HAS_NUMBA:
        print("numba is not installed; nothing to compare")
        return
    print("compiling kernels ...")
    coevo.warmup()
    print(f"{'workload':54s} {'numba':>9s} {'numpy':>9s} {'speedup':>8s}")
    for label, batch in WORKLOADS:
        compiled = time_backend("numba", batch)
        fallback = time_backend("numpy", batch, repeats=1)
        print(f"{label:54s} {compiled:8.3f}s {fallback:8.3f}s "
              f"{fallback / compiled:7.1f}x")


if __name__ == "__main__":
    main()
