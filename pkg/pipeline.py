"""
Eigenvector transport pipeline.
Graph -> spectrum -> pmfs -> pairwise transport costs -> MDS embedding -> scatter.
"""

import logging
import math
import re
import time
from enum import Enum
from pathlib import Path
from typing import Dict, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PositiveInt

from config import DEFAULT_ALPHA, MAX_DIM, OUTPUT_DIR, WORKERS
from embedding import DimSelection, Embedding, choose_dim, classical_mds, reconstruction_check
from exceptions import InvalidArgumentError, InvalidGraphError
from graph_core import Graph, build_cycle, build_grid, build_path, build_starlike_tree, incidence_matrices
from graph_parser import parse_edge_list, parse_swc
from graph_validator import GraphValidator
from pmf import PmfKind, eigenvector_pmfs
from result_storage import MANIFEST_FILE, SCATTER_FILE, ResultStorage
from spectral import LaplacianKind, Spectrum, graph_spectrum, phase_transition_split
from svg_plot import emit_svg_scatter
from transport import DistanceMatrix, LpObjective, distance_matrix

logger = logging.getLogger(__name__)

GRID_PATTERN = re.compile(r"^\s*(\d+)\s*[xX]\s*(\d+)\s*$")


class SourceKind(str, Enum):
    PATH = "path"
    CYCLE = "cycle"
    GRID = "grid"
    STAR = "star"
    GRAPH = "graph"
    SWC = "swc"


class Stage(str, Enum):
    SPECTRUM = "spectrum"
    DISTANCE = "distance"
    EMBEDDING = "embedding"


class GraphSource(BaseModel):
    """Where the graph comes from: a builder argument or an input file."""
    kind: SourceKind
    spec: str = Field(..., description="Builder argument (N, MxN, L1,L2,...) or input path")
    coords: Optional[str] = Field(None, description="Coordinates file for --graph")
    swc_unit_lengths: bool = False

    def build(self) -> Graph:
        if self.kind is SourceKind.PATH:
            return build_path(_parse_count(self.spec, "--path"))
        if self.kind is SourceKind.CYCLE:
            return build_cycle(_parse_count(self.spec, "--cycle"))
        if self.kind is SourceKind.GRID:
            match = GRID_PATTERN.match(self.spec)
            if not match:
                raise InvalidArgumentError(f"--grid expects MxN, got {self.spec!r}")
            return build_grid(int(match.group(1)), int(match.group(2)))
        if self.kind is SourceKind.STAR:
            try:
                branches = [int(token) for token in self.spec.split(",")]
            except ValueError:
                raise InvalidArgumentError(f"--star expects L1,L2,..., got {self.spec!r}") from None
            return build_starlike_tree(branches)

        text = Path(self.spec).read_text(encoding="utf-8")
        if self.kind is SourceKind.SWC:
            return parse_swc(text, coordinate_lengths=not self.swc_unit_lengths)
        coords_text = Path(self.coords).read_text(encoding="utf-8") if self.coords else None
        return parse_edge_list(text, coords_text)


def _parse_count(token: str, flag: str) -> int:
    try:
        count = int(token)
    except ValueError:
        raise InvalidArgumentError(f"{flag} expects an integer, got {token!r}") from None
    if count < 1:
        raise InvalidArgumentError(f"{flag} expects a positive integer, got {count}")
    return count


class RunConfig(BaseModel):
    """Everything a run depends on. The pipeline is deterministic, so there is no seed."""
    graph_source: GraphSource
    laplacian_kind: LaplacianKind = LaplacianKind.UNNORMALIZED
    pmf_kind: PmfKind = PmfKind.SQUARED
    alpha: float = Field(DEFAULT_ALPHA, ge=0.0, le=1.0)
    n0: Union[PositiveInt, Literal["auto"]] = "auto"
    dmax: PositiveInt = MAX_DIM
    lp_objective: LpObjective = LpObjective.UNIT
    output_dir: str = OUTPUT_DIR
    stop_after: Optional[Stage] = None
    verbosity: int = Field(0, ge=0)
    workers: PositiveInt = WORKERS

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "graph_source": {"kind": "grid", "spec": "7x3"},
                "alpha": 0.5,
                "n0": "auto",
                "output_dir": "results/grid7x3",
            }
        }
    )


class GraphSummary(BaseModel):
    node_count: int
    edge_count: int
    is_tree: bool
    junction_count: int


class SpectrumSummary(BaseModel):
    lambda_min: float
    lambda_max: float
    first_high_index: Optional[int] = Field(None, description="First index with lambda >= 4")
    low_count: int
    high_count: int
    repeated_clusters: int = Field(0, description="Groups of repeated eigenvalues")


class RunManifest(BaseModel):
    """Complete record of a run; only `timings` varies between identical runs."""
    config: Dict
    graph: GraphSummary
    spectrum: Optional[SpectrumSummary] = None
    max_asymmetry: Optional[float] = None
    gram_eigenvalues: Optional[List[float]] = None
    n0: Optional[int] = None
    dim_selection: Optional[DimSelection] = None
    gap_ratios: List[Optional[float]] = Field(default_factory=list)
    dim_fallback: bool = False
    stress: Optional[float] = None
    timings: Dict[str, float] = Field(default_factory=dict)
    warnings: List[str] = Field(default_factory=list)
    outputs: List[str] = Field(default_factory=list)
    stopped_after: Optional[Stage] = None


class EigenPortPipeline:
    """Runs Steps 0-3 for one RunConfig and writes outputs as each stage finishes."""

    def __init__(self, config: RunConfig, validator: Optional[GraphValidator] = None):
        self.config = config
        self.validator = validator or GraphValidator()
        self.warnings: List[str] = []
        self.timings: Dict[str, float] = {}

    def _warn(self, message: str):
        logger.warning(message)
        self.warnings.append(message)

    def _timed(self, stage: str, started: float):
        self.timings[stage] = round(time.perf_counter() - started, 6)

    def load_graph(self) -> Graph:
        started = time.perf_counter()
        g = self.config.graph_source.build()
        self.validator.require_connected(g)
        is_valid, errors, warnings = self.validator.validate_graph(g)
        if not is_valid:
            raise InvalidGraphError("; ".join(errors))
        for warning in warnings:
            self._warn(warning)
        self._timed("graph", started)
        logger.info(f"Graph: {g.node_count} nodes, {g.edge_count} edges")
        return g

    def compute_spectrum(self, g: Graph) -> Spectrum:
        started = time.perf_counter()
        spectrum = graph_spectrum(g, self.config.laplacian_kind)
        self._timed("spectrum", started)
        return spectrum

    def compute_distances(self, g: Graph, spectrum: Spectrum) -> DistanceMatrix:
        started = time.perf_counter()
        pmfs = eigenvector_pmfs(spectrum, self.config.pmf_kind)
        distances = distance_matrix(
            incidence_matrices(g),
            pmfs,
            alpha=self.config.alpha,
            objective=self.config.lp_objective,
            workers=self.config.workers,
            verbose=self.config.verbosity > 1,
        )
        if not distances.values.any():
            self._warn("distance matrix is identically zero; the embedding collapses to the origin")
        self._timed("distance", started)
        return distances

    def compute_embedding(self, distances: DistanceMatrix) -> Embedding:
        started = time.perf_counter()
        largest = distances.n_vectors - 1

        if self.config.n0 == "auto":
            gram = classical_mds(distances, 1).gram_eigenvalues
            choice = choose_dim(gram, dmax=self.config.dmax)
            n0 = choice.n0
            if choice.fallback:
                self._warn(f"no clear eigenvalue gap in the Gram spectrum; falling back to n0={n0}")
            if n0 > largest:
                self._warn(f"n0={n0} exceeds the {distances.n_vectors} points; using n0={largest}")
                n0 = largest
            emb = classical_mds(distances, n0)
            emb = Embedding(
                points=emb.points,
                gram_eigenvalues=emb.gram_eigenvalues,
                n0=emb.n0,
                selection=DimSelection.AUTO,
                gap_ratios=choice.gap_ratios,
                fallback=choice.fallback,
            )
        else:
            emb = classical_mds(distances, self.config.n0)

        self._timed("embedding", started)
        return emb

    def run(self) -> RunManifest:
        """Execute the stages in order, honoring stop_after."""
        cfg = self.config
        storage = ResultStorage(cfg.output_dir)
        stop_after = cfg.stop_after

        g = self.load_graph()
        manifest = RunManifest(
            config=cfg.model_dump(mode="json"),
            graph=GraphSummary(
                node_count=g.node_count,
                edge_count=g.edge_count,
                is_tree=g.is_tree(),
                junction_count=len(g.junctions()),
            ),
        )

        # Step 0: eigenvectors
        spectrum = self.compute_spectrum(g)
        split = phase_transition_split(spectrum)
        manifest.spectrum = SpectrumSummary(
            lambda_min=float(spectrum.eigenvalues[0]),
            lambda_max=float(spectrum.eigenvalues[-1]),
            first_high_index=split.first_high_index,
            low_count=len(split.low_indices),
            high_count=len(split.high_indices),
            repeated_clusters=len(spectrum.eigenvalue_clusters()),
        )
        storage.write_spectrum(spectrum)

        if stop_after is not Stage.SPECTRUM:
            # Step 1: pairwise transport costs
            distances = self.compute_distances(g, spectrum)
            manifest.max_asymmetry = distances.max_asymmetry
            storage.write_distance(distances, verbose=cfg.verbosity > 0)

            if stop_after is not Stage.DISTANCE:
                # Step 2: embed D
                emb = self.compute_embedding(distances)
                manifest.gram_eigenvalues = [float(v) for v in emb.gram_eigenvalues]
                manifest.n0 = emb.n0
                manifest.dim_selection = emb.selection
                manifest.gap_ratios = [r if math.isfinite(r) else None for r in emb.gap_ratios]
                manifest.dim_fallback = emb.fallback
                manifest.stress = reconstruction_check(emb, distances)
                storage.write_embedding(emb, spectrum)

                # Step 3: examine placement
                if stop_after is not Stage.EMBEDDING:
                    if emb.n0 <= 3:
                        started = time.perf_counter()
                        emit_svg_scatter(emb, spectrum, storage.path(SCATTER_FILE))
                        storage.written.append(SCATTER_FILE)
                        self._timed("plot", started)
                    else:
                        self._warn(f"scatter skipped: n0={emb.n0} cannot be drawn")

        manifest.stopped_after = stop_after
        manifest.timings = dict(self.timings)
        manifest.warnings = list(self.warnings)
        manifest.outputs = storage.written + [MANIFEST_FILE]
        storage.write_manifest(manifest.model_dump(mode="json"))
        return manifest


def run_pipeline(cfg: RunConfig) -> RunManifest:
    return EigenPortPipeline(cfg).run()


def mean_distance_from_dc(points: np.ndarray) -> float:
    """Mean Euclidean distance of every other eigenvector from the DC vector (row 0)."""
    points = np.asarray(points, dtype=float)
    offsets = points[1:] - points[0]
    return float(np.linalg.norm(offsets, axis=1).mean()) if len(offsets) else 0.0
