"""
Steps 2-3: classical (Torgerson) MDS of the distance matrix and
embedding-dimension selection from the Gram spectrum.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Sequence, Union

import numpy as np
import scipy.linalg
from scipy.spatial import procrustes
from scipy.spatial.distance import pdist, squareform

from config import FALLBACK_DIM, GAP_FACTOR, MAX_DIM, SYMMETRY_TOLERANCE
from exceptions import EmbeddingDimensionError, InvalidArgumentError
from transport import DistanceMatrix

logger = logging.getLogger(__name__)

EIGENVALUE_ZERO_TOLERANCE = 1e-10


class DimSelection(str, Enum):
    FIXED = "fixed"
    AUTO = "auto"


@dataclass(frozen=True)
class DimChoice:
    n0: int
    gap_ratios: List[float]
    fallback: bool


@dataclass(frozen=True, eq=False)
class Embedding:
    """n_vectors x n0 centered coordinates plus the full Gram spectrum (descending)."""

    points: np.ndarray
    gram_eigenvalues: np.ndarray
    n0: int
    selection: DimSelection = DimSelection.FIXED
    gap_ratios: List[float] = field(default_factory=list)
    fallback: bool = False

    @property
    def n_vectors(self) -> int:
        return self.points.shape[0]


def _as_matrix(D: Union[DistanceMatrix, np.ndarray]) -> np.ndarray:
    values = D.values if isinstance(D, DistanceMatrix) else D
    return np.asarray(values, dtype=float)


def _fix_axis_signs(points: np.ndarray) -> np.ndarray:
    """Make each axis' largest-magnitude coordinate (lowest index on ties) positive."""
    if points.size == 0:
        return points
    magnitudes = np.abs(points)
    peaks = magnitudes.max(axis=0)
    pivots = np.argmax(magnitudes >= peaks - 1e-12 * np.maximum(peaks, 1.0), axis=0)
    signs = np.sign(points[pivots, np.arange(points.shape[1])])
    signs[signs == 0] = 1.0
    return points * signs


def classical_mds(D: Union[DistanceMatrix, np.ndarray], n0: int) -> Embedding:
    """
    Torgerson MDS: B = -1/2 J (D*D) J, coordinates from the top-n0
    eigenvectors of B scaled by sqrt(eigenvalue).
    """
    values = _as_matrix(D)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise InvalidArgumentError(f"distance matrix must be square, got shape {values.shape}")
    count = values.shape[0]
    scale = max(1.0, float(np.abs(values).max(initial=0.0)))
    if not np.allclose(values, values.T, rtol=0.0, atol=SYMMETRY_TOLERANCE * scale):
        raise InvalidArgumentError("distance matrix is not symmetric")
    if np.abs(np.diag(values)).max(initial=0.0) > SYMMETRY_TOLERANCE * scale:
        raise InvalidArgumentError("distance matrix has a nonzero diagonal")
    if not 1 <= n0 <= count - 1:
        raise InvalidArgumentError(f"n0 must lie in [1, {count - 1}], got {n0}")

    centering = np.eye(count) - np.ones((count, count)) / count
    gram = -0.5 * centering @ (values ** 2) @ centering
    gram = (gram + gram.T) / 2.0

    eigenvalues, eigenvectors = scipy.linalg.eigh(gram)
    order = np.argsort(-eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    eigenvectors = eigenvectors[:, order]

    tolerance = EIGENVALUE_ZERO_TOLERANCE * max(1.0, float(np.abs(eigenvalues).max()))
    top = eigenvalues[:n0]
    if np.any(top < -tolerance):
        raise EmbeddingDimensionError(
            f"Gram eigenvalue {top.min():.6g} among the top {n0} is negative; "
            f"the distance matrix is too far from Euclidean for n0={n0}"
        )
    if np.any(eigenvalues < -tolerance):
        logger.info(f"Gram matrix has {int(np.sum(eigenvalues < -tolerance))} negative eigenvalue(s) "
                    f"(non-Euclidean distances); they carry no coordinates")

    points = eigenvectors[:, :n0] * np.sqrt(np.clip(top, 0.0, None))
    points = points - points.mean(axis=0)
    points = _fix_axis_signs(points)
    return Embedding(points=points, gram_eigenvalues=eigenvalues, n0=n0)


def choose_dim(
    gram_eigenvalues: Sequence[float],
    dmax: int = MAX_DIM,
    factor: float = GAP_FACTOR,
) -> DimChoice:
    """
    Scan d = 1..dmax and keep extending while the d-th eigenvalue is positive
    and exceeds factor times the (d+1)-th. When d = 1 does not qualify, take
    the smallest d >= 2 whose top d eigenvalues are positive and whose d-th
    exceeds factor times the next (two leading eigenvalues of similar size
    above a gap). If neither exists, fall back to FALLBACK_DIM and flag it.
    """
    values = np.asarray(gram_eigenvalues, dtype=float)
    if values.size == 0:
        raise InvalidArgumentError("no Gram eigenvalues to choose a dimension from")
    if dmax < 1:
        raise InvalidArgumentError(f"dmax must be >= 1, got {dmax}")

    ratios = []
    gaps = []
    chosen = 0
    for d in range(1, min(dmax, values.size - 1) + 1):
        current, following = values[d - 1], values[d]
        ratios.append(float(current / following) if following > 0 else float("inf"))
        has_gap = bool(values[:d].min() > 0 and current > factor * following)
        gaps.append(has_gap)
        if chosen == d - 1 and has_gap:
            chosen = d

    if chosen == 0:
        chosen = next((d for d, has_gap in enumerate(gaps, start=1) if has_gap), 0)
    if chosen == 0:
        logger.warning(f"No eigenvalue gap of factor {factor} in the top {dmax}; using n0={FALLBACK_DIM}")
        return DimChoice(n0=FALLBACK_DIM, gap_ratios=ratios, fallback=True)
    return DimChoice(n0=chosen, gap_ratios=ratios, fallback=False)


def pairwise_distances(points: np.ndarray) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    if points.shape[0] < 2:
        return np.zeros((points.shape[0], points.shape[0]))
    return squareform(pdist(points))


def reconstruction_check(emb: Embedding, D: Union[DistanceMatrix, np.ndarray]) -> float:
    """Relative Frobenius mismatch between embedded distances and D (0 when D = 0)."""
    target = _as_matrix(D)
    denominator = np.linalg.norm(target)
    if denominator == 0:
        return 0.0
    return float(np.linalg.norm(pairwise_distances(emb.points) - target) / denominator)


def procrustes_disparity(reference: np.ndarray, candidate: np.ndarray) -> float:
    """Residual after optimal translation, scaling and rotation of candidate onto reference."""
    _, _, disparity = procrustes(np.asarray(reference, float), np.asarray(candidate, float))
    return float(disparity)
