#!/usr/bin/env python3
"""Timing comparison between the compiled kernels and the numpy fallback.

Swaps each backend into the counting pipeline in turn and times the same
deterministic workloads, so the numbers reflect what the package actually
runs.  Results go to stdout as an aligned table.

    python3 benchmarks/bench_kernels.py [--repeats 3] [--quick]
"""

import argparse
import time

from diagcount import counting, kernels
from diagcount.counting import BoxSpec, box_count
from diagcount.instance import ProblemInstance

_KERNEL_NAMES = [
    "enum_product_powers", "value_counts", "fold_dense", "dot_opposite",
    "fold_sparse", "join_sparse", "residue_power_counts", "congruence_count",
]


def _swap_backend(impl):
    for name in _KERNEL_NAMES:
        setattr(kernels, name, getattr(impl, name))
    counting.clear_caches()


def _best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        counting.clear_caches()       # time real work, not memo hits
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _workloads(quick: bool):
    inst_a = ProblemInstance(degree=1, factors=2, equations=1, terms=3,
                             coeffs=((1, 1, -1),), moment_threshold=2)
    inst_b = ProblemInstance(degree=2, factors=1, equations=1, terms=5,
                             coeffs=((1, 1, 1, -1, -1),), moment_threshold=4)
    edge = 40 if quick else 80
    box_b = 600 if quick else 1500
    q = 243 if quick else 729

    def w_enum():
        kernels.enum_product_powers((edge, edge), 1)

    def w_residue():
        kernels.residue_power_counts(q, 2, 1)

    def w_box_a():
        box_count(inst_a, BoxSpec((edge, edge))).count

    def w_box_b():
        box_count(inst_b, BoxSpec((box_b,))).count

    def w_primitive():
        box_count(inst_a, BoxSpec((edge // 2, edge // 2), "primitive")).count

    return [
        (f"enum_product_powers edge={edge}", w_enum),
        (f"residue_power_counts q={q}", w_residue),
        (f"box_count bilinear ({edge},{edge})", w_box_a),
        (f"box_count five-squares ({box_b},)", w_box_b),
        (f"box_count primitive ({edge // 2},{edge // 2})", w_primitive),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=3,
                    help="take the best of this many runs (default 3)")
    ap.add_argument("--quick", action="store_true",
                    help="smaller workloads for a fast sanity pass")
    args = ap.parse_args()

    backends = kernels.available_backends()
    if "compiled" not in backends:
        print("note: compiled backend not importable; timing python only")

    rows = []
    for label, fn in _workloads(args.quick):
        timings = {}
        for bname, impl in sorted(backends.items()):
            _swap_backend(impl)
            fn()                      # warm-up pass, untimed
            timings[bname] = _best_of(fn, args.repeats)
        rows.append((label, timings))
    _swap_backend(kernels.available_backends()[
        "compiled" if "compiled" in backends else "python"])

    width = max(len(r[0]) for r in rows)
    names = sorted(backends)
    header = "workload".ljust(width) + "".join(f"  {n:>12}" for n in names)
    if len(names) == 2:
        header += f"  {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for label, timings in rows:
        line = label.ljust(width)
        for n in names:
            line += f"  {timings[n] * 1e3:>10.2f}ms"
        if len(names) == 2:
            line += f"  {timings['python'] / timings['compiled']:>8.1f}x"
        print(line)


if __name__ == "__main__":
    main()
