"""
Command-line entry point: `eigenport run [source flag] [options]`.

Exit codes: 0 ok, 1 usage, 2 bad graph, 3 numeric/LP failure, 4 I/O.
"""

import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from config import DEFAULT_ALPHA, LOG_LEVEL, MAX_DIM, OUTPUT_DIR, WORKERS, validate_settings
from exceptions import (
    DisconnectedGraphError,
    EmbeddingDimensionError,
    GraphFormatError,
    InvalidArgumentError,
    InvalidGraphError,
    TransportError,
    UnsupportedDimensionError,
)
from pipeline import GraphSource, RunConfig, RunManifest, SourceKind, Stage, run_pipeline

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_BAD_GRAPH = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

SOURCE_FLAGS = {
    "path": SourceKind.PATH,
    "cycle": SourceKind.CYCLE,
    "grid": SourceKind.GRID,
    "star": SourceKind.STAR,
    "graph": SourceKind.GRAPH,
    "swc": SourceKind.SWC,
}


class UsageError(Exception):
    pass


class EigenPortArgumentParser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; we reserve 2 for bad graphs."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _dim(value: str):
    if value == "auto":
        return value
    try:
        n0 = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'auto' or a positive integer, got {value!r}") from None
    if n0 < 1:
        raise argparse.ArgumentTypeError(f"n0 must be positive, got {n0}")
    return n0


def build_parser() -> argparse.ArgumentParser:
    parser = EigenPortArgumentParser(
        prog="eigenport",
        description="Organize graph Laplacian eigenvectors by the cost of transporting their pmfs.",
    )
    commands = parser.add_subparsers(dest="command", parser_class=EigenPortArgumentParser)
    run = commands.add_parser("run", help="Run the full pipeline on one graph")

    source = run.add_mutually_exclusive_group(required=True)
    source.add_argument("--path", metavar="N", help="Path graph P_N")
    source.add_argument("--cycle", metavar="N", help="Cycle graph C_N")
    source.add_argument("--grid", metavar="MxN", help="Grid graph P_M x P_N")
    source.add_argument("--star", metavar="L1,L2,...", help="Starlike tree with the given branch lengths")
    source.add_argument("--graph", metavar="PATH", help="Edge-list file 'u v [length]'")
    source.add_argument("--swc", metavar="PATH", help="SWC morphology file")
    run.add_argument("--coords", metavar="PATH", help="Node coordinates for --graph")
    run.add_argument("--swc-unit-lengths", action="store_true", help="Ignore SWC coordinates for edge lengths")

    run.add_argument("--alpha", type=float, default=DEFAULT_ALPHA, help="Cost exponent in [0, 1]")
    run.add_argument("--dim", type=_dim, default="auto", help="Embedding dimension: 'auto' or N")
    run.add_argument("--dmax", type=int, default=MAX_DIM, help="Largest dimension 'auto' may choose")
    run.add_argument("--laplacian", choices=["raw", "sym"], default="raw")
    run.add_argument("--pmf", choices=["squared", "l1"], default="squared")
    run.add_argument("--lp-objective", choices=["unit", "length"], default="unit")
    run.add_argument("--out", default=OUTPUT_DIR, help="Output directory")
    run.add_argument("--stop-after", choices=[stage.value for stage in Stage])
    run.add_argument("--workers", type=int, default=WORKERS, help="Threads for pairwise transport solves")
    run.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Translate parsed flags into a validated RunConfig."""
    flag = next(name for name in SOURCE_FLAGS if getattr(args, name) is not None)
    if args.coords and flag != "graph":
        raise UsageError("--coords is only valid with --graph")
    source = GraphSource(
        kind=SOURCE_FLAGS[flag],
        spec=getattr(args, flag),
        coords=args.coords,
        swc_unit_lengths=args.swc_unit_lengths,
    )
    try:
        return RunConfig(
            graph_source=source,
            laplacian_kind=args.laplacian,
            pmf_kind=args.pmf,
            alpha=args.alpha,
            n0=args.dim,
            dmax=args.dmax,
            lp_objective=args.lp_objective,
            output_dir=args.out,
            stop_after=args.stop_after,
            verbosity=args.verbose,
            workers=args.workers,
        )
    except ValidationError as e:
        raise UsageError(str(e)) from None


def configure_logging(verbosity: int):
    level = {0: LOG_LEVEL, 1: "INFO"}.get(verbosity, "DEBUG")
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", force=True)


def print_summary(manifest: RunManifest):
    print(f"\n{'='*80}")
    print("RUN SUMMARY")
    print('='*80)
    print(f"  Graph: {manifest.graph.node_count} nodes, {manifest.graph.edge_count} edges"
          f"{' (tree)' if manifest.graph.is_tree else ''}")
    if manifest.spectrum:
        s = manifest.spectrum
        print(f"  Eigenvalues: [{s.lambda_min:.6g}, {s.lambda_max:.6g}], {s.high_count} at or above 4")
    if manifest.max_asymmetry is not None:
        print(f"  Max asymmetry: {manifest.max_asymmetry:.3g}")
    if manifest.n0 is not None:
        chosen = manifest.dim_selection.value if manifest.dim_selection else "fixed"
        print(f"  Embedding: n0 = {manifest.n0} ({chosen}), stress = {manifest.stress:.3g}")
    if manifest.stopped_after:
        print(f"  Stopped after: {manifest.stopped_after.value}")

    for warning in manifest.warnings:
        print(f"[WARN] {warning}")
    print(f"\n[OK] Outputs in {manifest.config['output_dir']}:")
    for name in manifest.outputs:
        print(f"  - {name}")


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command != "run":
            parser.print_help()
            return EXIT_USAGE
        cfg = config_from_args(args)
        validate_settings()
    except UsageError as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_USAGE

    configure_logging(cfg.verbosity)
    print("Eigenvector Transport Embedding")
    print("=" * 80)
    print(f"Source: --{cfg.graph_source.kind.value} {cfg.graph_source.spec}")
    print(f"alpha = {cfg.alpha}, n0 = {cfg.n0}, laplacian = {cfg.laplacian_kind.value}, pmf = {cfg.pmf_kind.value}")

    try:
        manifest = run_pipeline(cfg)
    except (GraphFormatError, DisconnectedGraphError, InvalidGraphError) as e:
        print(f"\n[FAIL] Bad graph: {e}", file=sys.stderr)
        return EXIT_BAD_GRAPH
    except TransportError as e:
        print(f"\n[FAIL] Transport failed: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except EmbeddingDimensionError as e:
        print(f"\n[FAIL] Embedding failed: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InvalidArgumentError, UnsupportedDimensionError) as e:
        print(f"\n[ERROR] {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"\n[ERROR] I/O error: {e}", file=sys.stderr)
        return EXIT_IO

    print_summary(manifest)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
