"""
Desk-scale experiments.

1. P7 x P3 grid, alpha = 0.5: the Gram spectrum should show two eigenvalues
   each more than twice the third, and auto selection should pick n0 = 2.
2. Same grid, alpha = 1: a second run for comparison; we report the mean
   distance of the eigenvectors from the DC vector for both runs.
3. Starlike tree [5, 5, 5]: eigenvectors with lambda >= 4 should localize
   around the junction (higher IPR than the delocalized ones).
"""

import os
import sys

import numpy as np

from config import OUTPUT_DIR
from graph_core import build_starlike_tree
from pipeline import GraphSource, RunConfig, SourceKind, mean_distance_from_dc, run_pipeline
from result_storage import ResultStorage
from spectral import graph_spectrum, inverse_participation_ratio, phase_transition_split


def run_grid(alpha: float, base_dir: str):
    print("\n" + "="*60)
    print(f"Grid P7 x P3, alpha = {alpha}")
    print("="*60)

    out = os.path.join(base_dir, f"grid7x3_alpha{alpha:g}")
    cfg = RunConfig(
        graph_source=GraphSource(kind=SourceKind.GRID, spec="7x3"),
        alpha=alpha,
        n0="auto",
        output_dir=out,
    )
    manifest = run_pipeline(cfg)
    top = manifest.gram_eigenvalues[:3]
    print(f"  Top Gram eigenvalues: {', '.join(f'{v:.6g}' for v in top)}")
    gap = top[0] > 2 * top[2] and top[1] > 2 * top[2]
    print(f"  {'[OK]' if gap else '[WARN]'} top two exceed twice the third: {gap}")
    print(f"  Chosen n0: {manifest.n0}{' (fallback)' if manifest.dim_fallback else ''}")

    embedding = ResultStorage(out).load_embedding()
    points = embedding[[c for c in embedding.columns if c.startswith("x")]].to_numpy()
    spread = mean_distance_from_dc(points)
    print(f"  Mean distance from DC vector: {spread:.6g}")
    return manifest, spread


def run_starlike():
    print("\n" + "="*60)
    print("Starlike tree [5, 5, 5]: phase transition at lambda = 4")
    print("="*60)

    spectrum = graph_spectrum(build_starlike_tree([5, 5, 5]))
    split = phase_transition_split(spectrum)
    ipr = np.array([inverse_participation_ratio(spectrum.vector(k)) for k in range(spectrum.size)])
    print(f"  {len(split.low_indices)} eigenvalues below 4, {len(split.high_indices)} at or above")
    if not split.high_indices:
        print("  [FAIL] no eigenvalue at or above 4")
        return False

    print(f"  lambda_{split.first_high_index - 1} = {spectrum.eigenvalues[split.first_high_index - 1]:.4f}, "
          f"lambda_{split.first_high_index} = {spectrum.eigenvalues[split.first_high_index]:.4f}")
    low_median = float(np.median(ipr[split.low_indices]))
    high_min = float(ipr[split.high_indices].min())
    print(f"  Median IPR below 4: {low_median:.4f}; smallest IPR at or above 4: {high_min:.4f}")
    localized = high_min > low_median
    print(f"  {'[OK]' if localized else '[FAIL]'} high-frequency eigenvectors are localized")
    return localized


def main():
    base_dir = sys.argv[1] if len(sys.argv) > 1 else os.path.join(OUTPUT_DIR, "experiments")

    _, half = run_grid(0.5, base_dir)
    _, full = run_grid(1.0, base_dir)
    print(f"\n  Mean distance from DC: alpha=0.5 -> {half:.6g}, alpha=1 -> {full:.6g}")

    localized = run_starlike()

    print("\n" + "="*60)
    print("SUMMARY")
    print("="*60)
    print(f"  Outputs: {base_dir}")
    print(f"  {'[OK]' if localized else '[FAIL]'} phase transition check")
    return 0 if localized else 1


if __name__ == "__main__":
    sys.exit(main())
