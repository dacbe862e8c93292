"""
Result storage module for saving and reloading pipeline outputs.
CSVs carry 17 significant digits so every double round-trips.
"""

import json
import logging
import os
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from config import CSV_FLOAT_FORMAT, OUTPUT_DIR
from embedding import Embedding
from spectral import Spectrum
from transport import DistanceMatrix

logger = logging.getLogger(__name__)

SPECTRUM_FILE = "spectrum.csv"
EIGENVECTORS_FILE = "eigenvectors.csv"
DISTANCE_FILE = "distance.csv"
DISTANCE_META_FILE = "distance.json"
EMBEDDING_FILE = "embedding.csv"
SCATTER_FILE = "embedding.svg"
MANIFEST_FILE = "manifest.json"


class ResultStorage:
    """Manages the files of one pipeline run."""

    def __init__(self, output_dir: str = OUTPUT_DIR):
        self.output_dir = output_dir
        self.written: List[str] = []
        self._ensure_output_dir()

    def _ensure_output_dir(self):
        """Create output directory if it doesn't exist."""
        os.makedirs(self.output_dir, exist_ok=True)

    def path(self, name: str) -> str:
        return os.path.join(self.output_dir, name)

    def _record(self, name: str) -> str:
        if name not in self.written:
            self.written.append(name)
        logger.info(f"Wrote {self.path(name)}")
        return self.path(name)

    def _write_csv(self, frame: pd.DataFrame, name: str, index: bool = False, index_label: Optional[str] = None) -> str:
        frame.to_csv(
            self.path(name),
            index=index,
            index_label=index_label,
            float_format=CSV_FLOAT_FORMAT,
            lineterminator="\n",
        )
        return self._record(name)

    def write_spectrum(self, spectrum: Spectrum) -> List[str]:
        """spectrum.csv (k,lambda) and eigenvectors.csv (column phi_k)."""
        values = pd.DataFrame({"k": np.arange(spectrum.size), "lambda": spectrum.eigenvalues})
        vectors = pd.DataFrame(
            spectrum.eigenvectors,
            columns=[f"phi_{k}" for k in range(spectrum.size)],
        )
        vectors.insert(0, "node", np.arange(spectrum.eigenvectors.shape[0]))
        return [self._write_csv(values, SPECTRUM_FILE), self._write_csv(vectors, EIGENVECTORS_FILE)]

    def write_distance(self, distances: DistanceMatrix, verbose: bool = False) -> List[str]:
        """distance.csv with index header row/column, distance.json with diagnostics."""
        labels = list(range(distances.n_vectors))
        frame = pd.DataFrame(distances.values, index=labels, columns=labels)
        paths = [self._write_csv(frame, DISTANCE_FILE, index=True, index_label="k")]

        meta: Dict = {
            "alpha": distances.alpha,
            "n_vectors": distances.n_vectors,
            "symmetrized": distances.symmetrized,
            "max_asymmetry": distances.max_asymmetry,
        }
        if verbose:
            meta["pair_stats"] = {
                f"{i},{j}": stats.to_dict() for (i, j), stats in sorted(distances.pair_stats.items())
            }
        with open(self.path(DISTANCE_META_FILE), "w", encoding="utf-8") as f:
            json.dump(meta, f, indent=2)
        paths.append(self._record(DISTANCE_META_FILE))
        return paths

    def write_embedding(self, emb: Embedding, spectrum: Spectrum) -> str:
        """embedding.csv: k, lambda, x0..x{n0-1}."""
        frame = pd.DataFrame({"k": np.arange(emb.n_vectors), "lambda": spectrum.eigenvalues})
        for axis in range(emb.n0):
            frame[f"x{axis}"] = emb.points[:, axis]
        return self._write_csv(frame, EMBEDDING_FILE)

    def write_manifest(self, manifest: Dict) -> str:
        with open(self.path(MANIFEST_FILE), "w", encoding="utf-8") as f:
            json.dump(manifest, f, indent=2, ensure_ascii=False)
        return self._record(MANIFEST_FILE)

    def load_manifest(self) -> Dict:
        """Load the manifest of this run, or {} if it has not been written."""
        if not os.path.exists(self.path(MANIFEST_FILE)):
            return {}
        with open(self.path(MANIFEST_FILE), "r", encoding="utf-8") as f:
            return json.load(f)

    def load_distance(self) -> np.ndarray:
        frame = pd.read_csv(self.path(DISTANCE_FILE), index_col="k", float_precision="round_trip")
        return frame.to_numpy(dtype=float)

    def load_embedding(self) -> pd.DataFrame:
        return pd.read_csv(self.path(EMBEDDING_FILE), float_precision="round_trip")
