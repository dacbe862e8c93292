"""
SVG scatter of the eigenvector embedding.

Every eigenvector is drawn as its own artist with gid `eig-<k>`, so the SVG
carries one group per marker. The DC vector is magenta, the Fiedler vector
cyan, eigenvectors past the phase transition red, the rest gray by eigenvalue.
"""

import logging
import math
from pathlib import Path
from typing import Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from config import PHASE_THRESHOLD  # noqa: E402
from embedding import Embedding  # noqa: E402
from exceptions import InvalidArgumentError, UnsupportedDimensionError  # noqa: E402
from spectral import Spectrum  # noqa: E402

logger = logging.getLogger(__name__)

DC_COLOR = "magenta"
FIEDLER_COLOR = "cyan"
LOCALIZED_COLOR = "red"

# fixed viewing angles for 3D embeddings
ELEVATION = math.radians(30.0)
AZIMUTH = math.radians(-60.0)


def project_points(points: np.ndarray) -> np.ndarray:
    """Map 1D/2D/3D coordinates onto the drawing plane."""
    n0 = points.shape[1]
    if n0 == 1:
        return np.column_stack([points[:, 0], np.zeros(len(points))])
    if n0 == 2:
        return points
    if n0 == 3:
        rotate_z = np.array([
            [math.cos(AZIMUTH), -math.sin(AZIMUTH), 0.0],
            [math.sin(AZIMUTH), math.cos(AZIMUTH), 0.0],
            [0.0, 0.0, 1.0],
        ])
        tilt_x = np.array([
            [1.0, 0.0, 0.0],
            [0.0, math.cos(ELEVATION), -math.sin(ELEVATION)],
            [0.0, math.sin(ELEVATION), math.cos(ELEVATION)],
        ])
        rotated = points @ rotate_z.T @ tilt_x.T
        # view from +y after tilting: screen axes are (x, z)
        return rotated[:, [0, 2]]
    raise UnsupportedDimensionError(f"scatter supports n0 <= 3, got {n0}")


def emit_svg_scatter(emb: Embedding, spectrum: Spectrum, path: Union[str, Path]) -> Path:
    """Write the labeled scatter to `path` and return it."""
    if emb.n_vectors == 0:
        raise InvalidArgumentError("cannot plot an empty embedding")
    if emb.n0 > 3:
        raise UnsupportedDimensionError(f"scatter supports n0 <= 3, got {emb.n0}")
    if spectrum.size != emb.n_vectors:
        raise InvalidArgumentError(f"{emb.n_vectors} points but {spectrum.size} eigenvalues")

    plane = project_points(emb.points)
    eigenvalues = spectrum.eigenvalues
    span = float(eigenvalues.max() - eigenvalues.min()) or 1.0
    fiedler = spectrum.fiedler_index

    matplotlib.rcParams["svg.hashsalt"] = "eigenport"
    figure, axes = plt.subplots(figsize=(7.0, 6.0 if emb.n0 > 1 else 2.5))
    try:
        for k, (x, y) in enumerate(plane):
            if k == 0:
                color, size, gid = DC_COLOR, 90, "dc-vector"
            elif k == fiedler:
                color, size, gid = FIEDLER_COLOR, 90, "fiedler-vector"
            elif eigenvalues[k] >= PHASE_THRESHOLD:
                color, size, gid = LOCALIZED_COLOR, 40, f"eig-{k}"
            else:
                shade = 0.15 + 0.7 * float(eigenvalues[k] - eigenvalues.min()) / span
                color, size, gid = str(round(shade, 4)), 40, f"eig-{k}"
            axes.scatter([x], [y], s=size, c=[color], edgecolors="black", linewidths=0.5, gid=gid, zorder=2)
            axes.annotate(str(k), (x, y), textcoords="offset points", xytext=(4, 4), fontsize=7)

        axes.set_title(f"Eigenvector embedding (n0={emb.n0}, {emb.n_vectors} vectors)")
        if emb.n0 == 1:
            axes.set_yticks([])
        else:
            axes.set_aspect("equal", adjustable="datalim")
        axes.grid(True, linewidth=0.3, zorder=0)

        path = Path(path)
        figure.savefig(path, format="svg", metadata={"Date": None})
    finally:
        plt.close(figure)
    logger.info(f"Wrote scatter to {path}")
    return path
