"""Time the search kernels compiled and uncompiled on a few corpus workloads.

    python3 benchmarks/bench_kernels.py [--repeat N]

The uncompiled column is measured in-process through each kernel's ``py_func``
(identical to running with ``COVPROP_DISABLE_JIT=1``).
"""

from __future__ import annotations

import argparse
import itertools
import time

from covprop import _kernels
from covprop._jit import JIT_ENABLED
from covprop.almost_iso import check_almost_iso
from covprop.corpus import monoid_corpus
from covprop.upsilon import critical_values, feasible_pairs, probe_points, upsilon


def _python_select(kernel, *arrays):
    return getattr(kernel, "py_func", kernel)


def _timed(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def workloads():
    named = dict(monoid_corpus())
    six = [a for a, G in named.items() if G.n == 6]

    def corpus_upsilon():
        for a, b in itertools.combinations_with_replacement(six, 2):
            upsilon(named[a], named[b])

    def enumerate_pairs():
        G = named["S3_half"]
        for p, _, _ in probe_points(critical_values(G, G)):
            feasible_pairs(G, G, p, limit=10**6)

    def verify_pairs():
        G = named["S3_word"]
        pairs, _ = feasible_pairs(G, G, probe_points(critical_values(G, G))[-1][0], limit=2000)
        for pair in pairs:
            check_almost_iso(G, G, pair)

    return {
        "upsilon on 6-element pairs": corpus_upsilon,
        "enumerate all S3 self-pairs": enumerate_pairs,
        "re-verify 2000 S3 pairs": verify_pairs,
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"numba jit enabled: {JIT_ENABLED}")
    print(f"{'workload':32s} {'compiled':>10s} {'python':>10s} {'speedup':>8s}")
    for name, fn in workloads().items():
        fn()  # warm the JIT cache
        fast = _timed(fn, args.repeat)
        orig = _kernels.select
        _kernels.select = _python_select
        try:
            slow = _timed(fn, args.repeat)
        finally:
            _kernels.select = orig
        print(f"{name:32s} {fast:10.3f} {slow:10.3f} {slow / fast:8.1f}x")


if __name__ == "__main__":
    main()
