"""Command-line interface: analyze, sweep, gen, serve.

Exit codes: 0 success, 1 argument/ingest errors, 2 analysis errors. Errors go
to stderr. `DEPTHSCOPE_CACHE_DIR` and `DEPTHSCOPE_SEED` provide environment
defaults for the cache directory and the seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .dataset import (Bimodal1D, CurveEnsemble, DatasetFormat, Unimodal1D,
                      generate_synthetic, parse_dataset, serialize_dataset)
from .errors import AnalysisError, DepthscopeError, IngestError
from .pipeline import AnalysisSession, AnalyzeConfig, analyze, serialize_snapshot
from .stats import spearman_rank_correlation

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ANALYSIS = 2


def _env_seed(value: int | None) -> int:
    if value is not None:
        return value
    return int(os.environ.get("DEPTHSCOPE_SEED", "0"))


def _env_cache_dir() -> Path | None:
    v = os.environ.get("DEPTHSCOPE_CACHE_DIR")
    return Path(v) if v else None


def _load_dataset(path: str):
    p = Path(path)
    if not p.exists():
        raise IngestError(f"input file not found: {p}")
    data = p.read_bytes()
    if p.suffix == ".csv":
        sidecar = p.with_suffix(".schema.json")
        if not sidecar.exists():
            raise IngestError(f"CSV input needs a sidecar schema at {sidecar}")
        return parse_dataset(data, DatasetFormat.CSV_WITH_SCHEMA, sidecar.read_bytes())
    return parse_dataset(data, DatasetFormat.JSON_V1)


def _config_from_args(args: argparse.Namespace, tau: float | None = None,
                      tau_quantile: float | None = None) -> AnalyzeConfig:
    return AnalyzeConfig(
        budget=args.budget,
        seed=_env_seed(args.seed),
        tau=tau if tau is not None else getattr(args, "tau", None),
        tau_quantile=tau_quantile if tau_quantile is not None else getattr(args, "tau_quantile", None),
        k=getattr(args, "k", None),
        layout_mode=getattr(args, "layout", "auto"),
    )


def _validate_tau_flags(args: argparse.Namespace) -> None:
    """Flag validation happens before any computation, and maps to exit 1."""
    tau = getattr(args, "tau", None)
    tq = getattr(args, "tau_quantile", None)
    if tau is not None and tau < 0:
        raise IngestError("tau must be nonnegative")
    if tq is not None and not 0.0 <= tq <= 1.0:
        raise IngestError("tau quantile must be in [0, 1]")
    if tau is not None and tq is not None:
        raise IngestError("give either --tau or --tau-quantile, not both")


def cmd_analyze(args: argparse.Namespace) -> int:
    _validate_tau_flags(args)
    dataset = _load_dataset(args.input)
    config = _config_from_args(args)
    config.validate()
    snap = analyze(dataset, config, cache_dir=_env_cache_dir())
    out = Path(args.out)
    out.write_bytes(serialize_snapshot(snap))
    if args.similarity_csv:
        from .similarity import similarity_to_csv
        Path(args.similarity_csv).write_text(similarity_to_csv(snap.similarity))
    timings = " ".join(f"{k}={v:.0f}ms" for k, v in sorted(snap.timings_ms.items()))
    print(f"n={snap.depths.size} bands={snap.band_count} tau={snap.tau:.6g} "
          f"k={snap.k} outliers={int(snap.outliers.is_outlier.sum())} {timings}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    dataset = _load_dataset(args.input)
    quantiles = [float(q) for q in args.quantiles.split(",") if q.strip()]
    if not quantiles:
        raise IngestError("empty quantile list")
    if any(not 0.0 <= q <= 1.0 for q in quantiles):
        raise IngestError("quantiles must be in [0, 1]")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    seed = _env_seed(args.seed)
    session = AnalysisSession(dataset, budget=args.budget, seed=seed,
                              cache_dir=_env_cache_dir())
    reference = analyze(dataset, AnalyzeConfig(budget=args.budget, seed=seed,
                                               layout_mode=args.layout),
                        session=session)
    print("tau_quantile tau suggested_k rank_corr_vs_inf")
    for q in quantiles:
        cfg = AnalyzeConfig(budget=args.budget, seed=seed, tau_quantile=q,
                            layout_mode=args.layout)
        snap = analyze(dataset, cfg, session=session)
        (out_dir / f"snapshot-q{q:g}.json").write_bytes(serialize_snapshot(snap))
        corr = spearman_rank_correlation(snap.depths, reference.depths)
        print(f"{q:g} {snap.tau:.6g} {snap.spectral.suggested_k} {corr:.4f}")
    return EXIT_OK


_GEN_SPECS = {
    "unimodal": lambda n: Unimodal1D(n=n),
    "bimodal": lambda n: Bimodal1D(n=n),
    "curves": lambda n: CurveEnsemble(n=n),
}


def cmd_gen(args: argparse.Namespace) -> int:
    if args.spec not in _GEN_SPECS:
        raise IngestError(f"unknown spec {args.spec!r}; choose from {sorted(_GEN_SPECS)}")
    if args.n <= 0:
        raise IngestError(f"n must be positive, got {args.n}")
    dataset = generate_synthetic(_GEN_SPECS[args.spec](args.n), seed=_env_seed(args.seed))
    Path(args.out).write_bytes(serialize_dataset(dataset))
    print(f"wrote {args.out}: n={dataset.n}, {len(dataset.schema)} attributes")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    from .service import run_service
    try:
        run_service(port=args.port, data_dir=Path(args.data_dir) if args.data_dir else _env_cache_dir(),
                    announce=True)
    except OSError as e:
        print(f"cannot bind port {args.port}: {e}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="depthscope",
                                     description="Band-inclusion similarity explorer")
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="analyze a dataset and write a snapshot JSON")
    pa.add_argument("--input", required=True)
    pa.add_argument("--out", required=True)
    pa.add_argument("--tau", type=float, default=None)
    pa.add_argument("--tau-quantile", dest="tau_quantile", type=float, default=None)
    pa.add_argument("--k", type=int, default=None)
    pa.add_argument("--budget", type=int, default=None)
    pa.add_argument("--seed", type=int, default=None)
    pa.add_argument("--layout", choices=("auto", "force", "geospatial"), default="auto")
    pa.add_argument("--similarity-csv", dest="similarity_csv", default=None,
                    help="also export the similarity matrix as CSV")
    pa.set_defaults(func=cmd_analyze)

    ps = sub.add_parser("sweep", help="snapshot a list of tau quantiles, reusing the inclusion matrix")
    ps.add_argument("--input", required=True)
    ps.add_argument("--quantiles", required=True, help="comma-separated, e.g. 0.25,0.5,1.0")
    ps.add_argument("--out-dir", dest="out_dir", required=True)
    ps.add_argument("--budget", type=int, default=None)
    ps.add_argument("--seed", type=int, default=None)
    ps.add_argument("--layout", choices=("auto", "force", "geospatial"), default="auto")
    ps.set_defaults(func=cmd_sweep)

    pg = sub.add_parser("gen", help="generate a synthetic dataset JSON")
    pg.add_argument("--spec", required=True, help="unimodal | bimodal | curves")
    pg.add_argument("--n", type=int, required=True)
    pg.add_argument("--seed", type=int, default=None)
    pg.add_argument("--out", required=True)
    pg.set_defaults(func=cmd_gen)

    pv = sub.add_parser("serve", help="run the HTTP service")
    pv.add_argument("--port", type=int, default=8765)
    pv.add_argument("--data-dir", dest="data_dir", default=None)
    pv.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except IngestError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except AnalysisError as e:
        print(f"analysis error: {e}", file=sys.stderr)
        return EXIT_ANALYSIS
    except DepthscopeError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ANALYSIS


if __name__ == "__main__":
    sys.exit(main())
