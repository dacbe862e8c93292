"""
Laplacian assembly, dense symmetric eigendecomposition and closed-form
eigenpairs for paths, cycles and grids.

Edge lengths never enter the Laplacian; they only weigh transport costs.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from config import CLUSTER_GAP, PHASE_THRESHOLD, SYMMETRY_TOLERANCE, UNIT_NORM_TOLERANCE
from exceptions import InvalidArgumentError
from graph_core import Graph

logger = logging.getLogger(__name__)

SIGN_TIE_TOLERANCE = 1e-12

GridMode = Tuple[int, int]


class LaplacianKind(str, Enum):
    UNNORMALIZED = "raw"
    SYMMETRIC = "sym"


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Ascending eigenvalues with unit eigenvectors; column k pairs with eigenvalue k."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    laplacian_kind: LaplacianKind = LaplacianKind.UNNORMALIZED

    @property
    def size(self) -> int:
        return len(self.eigenvalues)

    @property
    def fiedler_index(self) -> Optional[int]:
        return 1 if self.size >= 2 else None

    def vector(self, k: int) -> np.ndarray:
        return self.eigenvectors[:, k]

    def residuals(self, laplacian_matrix: np.ndarray) -> np.ndarray:
        """||L phi_k - lambda_k phi_k||_2 for every k."""
        delta = laplacian_matrix @ self.eigenvectors - self.eigenvectors * self.eigenvalues
        return np.linalg.norm(delta, axis=0)

    def orthonormality_defect(self) -> float:
        gram = self.eigenvectors.T @ self.eigenvectors
        return float(np.abs(gram - np.eye(self.size)).max())

    def eigenvalue_clusters(self, gap: float = CLUSTER_GAP) -> List[List[int]]:
        """Index runs of repeated eigenvalues (neighbours closer than gap); singletons are left out."""
        clusters = []
        current = [0] if self.size else []
        for k in range(1, self.size):
            if self.eigenvalues[k] - self.eigenvalues[k - 1] < gap:
                current.append(k)
                continue
            if len(current) > 1:
                clusters.append(current)
            current = [k]
        if len(current) > 1:
            clusters.append(current)
        return clusters


@dataclass(frozen=True)
class PhaseSplit:
    low_indices: List[int]
    high_indices: List[int]
    first_high_index: Optional[int]
    threshold: float


def laplacian(g: Graph, kind: LaplacianKind = LaplacianKind.UNNORMALIZED) -> np.ndarray:
    """Combinatorial D - A, or its symmetric normalization D^-1/2 (D - A) D^-1/2."""
    kind = LaplacianKind(kind)
    adjacency = g.adjacency()
    degrees = adjacency.sum(axis=1)
    matrix = np.diag(degrees) - adjacency
    if kind is LaplacianKind.SYMMETRIC:
        if np.any(degrees == 0):
            isolated = [int(x) for x in np.flatnonzero(degrees == 0)]
            raise InvalidArgumentError(f"normalized Laplacian undefined: isolated nodes {isolated[:5]}")
        scale = 1.0 / np.sqrt(degrees)
        matrix = scale[:, None] * matrix * scale[None, :]
    return matrix


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Make each column's largest-magnitude entry (lowest index on ties) positive."""
    magnitudes = np.abs(vectors)
    peaks = magnitudes.max(axis=0)
    pivots = np.argmax(magnitudes >= peaks - SIGN_TIE_TOLERANCE, axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def eigendecompose(
    laplacian_matrix: np.ndarray,
    kind: LaplacianKind = LaplacianKind.UNNORMALIZED,
) -> Spectrum:
    """Full dense eigendecomposition with a deterministic sign convention."""
    matrix = np.asarray(laplacian_matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise InvalidArgumentError(f"expected a square matrix, got shape {matrix.shape}")
    if not np.allclose(matrix, matrix.T, rtol=0.0, atol=SYMMETRY_TOLERANCE):
        raise InvalidArgumentError("matrix is not symmetric")

    eigenvalues, eigenvectors = scipy.linalg.eigh(matrix)
    eigenvectors = _fix_signs(eigenvectors)
    logger.debug(f"Eigendecomposed {matrix.shape[0]}x{matrix.shape[0]} matrix, "
                 f"lambda in [{eigenvalues[0]:.6g}, {eigenvalues[-1]:.6g}]")
    return Spectrum(eigenvalues=eigenvalues, eigenvectors=eigenvectors, laplacian_kind=LaplacianKind(kind))


def graph_spectrum(g: Graph, kind: LaplacianKind = LaplacianKind.UNNORMALIZED) -> Spectrum:
    return eigendecompose(laplacian(g, kind), kind)


# Closed-form oracles

def dct2_eigenpairs(n: int) -> Spectrum:
    """
    Eigenpairs of L(P_n): lambda_k = 4 sin^2(pi k / 2n) and the DCT-II vectors
    a_k cos(pi k (x + 1/2) / n) with a_0 = 1/sqrt(n), a_k = sqrt(2/n).
    """
    if n < 1:
        raise InvalidArgumentError(f"n must be >= 1, got {n}")
    k = np.arange(n)
    x = np.arange(n)
    eigenvalues = 4.0 * np.sin(np.pi * k / (2 * n)) ** 2
    normalizers = np.full(n, np.sqrt(2.0 / n))
    normalizers[0] = 1.0 / np.sqrt(n)
    eigenvectors = normalizers[None, :] * np.cos(np.pi * np.outer(x + 0.5, k) / n)
    return Spectrum(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def dct1_eigenpairs(n: int) -> Spectrum:
    """
    Eigenpairs of the symmetric-normalized Laplacian of P_n (n >= 2):
    lambda_k = 1 - cos(pi k / (n-1)), vectors proportional to
    sqrt(deg) * cos(pi k x / (n-1)).
    """
    if n < 2:
        raise InvalidArgumentError(f"n must be >= 2, got {n}")
    k = np.arange(n)
    x = np.arange(n)
    theta = np.pi * k / (n - 1)
    eigenvalues = 1.0 - np.cos(theta)
    degrees = np.full(n, 2.0)
    degrees[0] = degrees[-1] = 1.0
    vectors = np.sqrt(degrees)[:, None] * np.cos(np.outer(x, theta))
    vectors /= np.linalg.norm(vectors, axis=0)
    return Spectrum(eigenvalues=eigenvalues, eigenvectors=vectors, laplacian_kind=LaplacianKind.SYMMETRIC)


def cycle_eigenvalues(n: int) -> np.ndarray:
    """Ascending eigenvalues 4 sin^2(pi k / n) of L(C_n)."""
    if n < 3:
        raise InvalidArgumentError(f"n must be >= 3, got {n}")
    return np.sort(4.0 * np.sin(np.pi * np.arange(n) / n) ** 2)


def grid_eigenpairs(m: int, n: int) -> Tuple[Spectrum, List[GridMode]]:
    """
    Product eigenpairs of P_m x P_n sorted by eigenvalue, ties broken
    lexicographically on (k_x, k_y). Returns the spectrum and the map from
    sorted index to (k_x, k_y).
    """
    if m < 1 or n < 1:
        raise InvalidArgumentError(f"m, n must be >= 1, got {m}x{n}")
    horizontal = dct2_eigenpairs(m)
    vertical = dct2_eigenpairs(n)

    modes = [(kx, ky) for kx in range(m) for ky in range(n)]
    values = {mode: horizontal.eigenvalues[mode[0]] + vertical.eigenvalues[mode[1]] for mode in modes}
    modes.sort(key=lambda mode: (round(values[mode], 12), mode))

    eigenvalues = np.array([values[mode] for mode in modes])
    # node (x, y) sits at y * m + x, so the product vector is kron(phi_y, phi_x)
    eigenvectors = np.column_stack([
        np.kron(vertical.vector(ky), horizontal.vector(kx)) for kx, ky in modes
    ])
    return Spectrum(eigenvalues=eigenvalues, eigenvectors=eigenvectors), modes


def grid_mode_index(index_map: Sequence[GridMode], mode: GridMode) -> int:
    return list(index_map).index(tuple(mode))


def vertical_crossing_index(m: int, n: int) -> int:
    """Sorted position where the first vertical mode (0, 1) enters the sequence."""
    _, index_map = grid_eigenpairs(m, n)
    return grid_mode_index(index_map, (0, 1))


# Localization diagnostics

def phase_transition_split(s: Spectrum, threshold: float = PHASE_THRESHOLD) -> PhaseSplit:
    """Partition eigenvector indices into lambda < threshold and lambda >= threshold."""
    low = [int(k) for k in np.flatnonzero(s.eigenvalues < threshold)]
    high = [int(k) for k in np.flatnonzero(s.eigenvalues >= threshold)]
    first_high = high[0] if high else None
    return PhaseSplit(low_indices=low, high_indices=high, first_high_index=first_high, threshold=threshold)


def require_unit_vector(phi: np.ndarray) -> np.ndarray:
    vector = np.asarray(phi, dtype=float)
    norm = np.linalg.norm(vector)
    if abs(norm - 1.0) > UNIT_NORM_TOLERANCE:
        raise InvalidArgumentError(f"expected a unit vector, got norm {norm:.12g}")
    return vector


def inverse_participation_ratio(phi: np.ndarray) -> float:
    """Sum of fourth powers: 1/n for a flat vector, 1 for a delta."""
    vector = require_unit_vector(phi)
    return float(np.sum(vector ** 4))
