#!/usr/bin/env python3
"""Tau-robustness experiment over many seeds.

For unimodal and bimodal 99-point samples, sweeps tau quantiles and records
the suggested cluster count and the Spearman correlation of depth rankings
against the unrestricted analysis. Reproduces the robustness contrast: the
unimodal ranking is stable and never grows modes, the bimodal sample flips to
two modes once tau restricts band sizes.
"""

import argparse

import numpy as np

from depthscope import (AnalysisSession, AnalyzeConfig, Bimodal1D, Unimodal1D,
                        analyze, generate_synthetic)
from depthscope.stats import spearman_rank_correlation

QUANTILES = (0.25, 0.5, 0.75, 1.0)


def sweep(name: str, spec_factory, seeds: int) -> None:
    print(f"--- {name}")
    print("seed " + " ".join(f"q{q:g}:k/rho" for q in QUANTILES))
    for seed in range(seeds):
        dataset = generate_synthetic(spec_factory(), seed=seed)
        session = AnalysisSession(dataset)
        reference = analyze(dataset, AnalyzeConfig(), session=session)
        cells = []
        for q in QUANTILES:
            snap = analyze(dataset, AnalyzeConfig(tau_quantile=q), session=session)
            rho = spearman_rank_correlation(snap.depths, reference.depths)
            cells.append(f"{snap.spectral.suggested_k}/{rho:.2f}")
        print(f"{seed:4d} " + " ".join(cells))


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--seeds", type=int, default=10)
    args = parser.parse_args()
    np.set_printoptions(precision=3)
    sweep("unimodal n=99", lambda: Unimodal1D(99), args.seeds)
    sweep("bimodal n=99 (6 sigma)", lambda: Bimodal1D(99), args.seeds)


if __name__ == "__main__":
    main()
