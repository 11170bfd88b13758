#!/usr/bin/env python3
"""Single-core timing of the inclusion-matrix build and the tau retune.

The reference budget: a 250-point, 53-attribute mixed dataset must finish the
inclusion computation in under 30 seconds and a retune at a new tau in under
one second (the interactive slider budget).
"""

import argparse
import time

from depthscope import AnalysisSession, AnalyzeConfig, analyze, generate_mixed, retune


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--n", type=int, default=250)
    parser.add_argument("--seed", type=int, default=11)
    parser.add_argument("--budget", type=int, default=None)
    args = parser.parse_args()

    dataset = generate_mixed(args.n, seed=args.seed, n_scalar=30, n_categorical=15,
                             n_point=4, n_function=2, n_curve=2)
    print(f"n={dataset.n}, {len(dataset.schema)} attributes")
    session = AnalysisSession(dataset, budget=args.budget)

    t0 = time.perf_counter()
    matrix = session.ensure_built()
    print(f"inclusion matrix: {matrix.band_count} bands x {matrix.n} points "
          f"in {time.perf_counter() - t0:.2f}s")

    t1 = time.perf_counter()
    analyze(dataset, AnalyzeConfig(tau_quantile=0.5, layout_mode="force"),
            session=session)
    print(f"first snapshot (jit warm-up included): {time.perf_counter() - t1:.2f}s")

    for q in (0.25, 0.75, 1.0):
        t2 = time.perf_counter()
        snap = retune(session, AnalyzeConfig(tau_quantile=q, layout_mode="force"))
        stage = " ".join(f"{k}={v:.0f}" for k, v in sorted(snap.timings_ms.items())
                         if k not in ("plan", "inclusion", "total"))
        print(f"retune q={q}: {time.perf_counter() - t2:.3f}s  ({stage} ms)")


if __name__ == "__main__":
    main()
