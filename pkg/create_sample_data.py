"""
Create sample input files for trying the CLI.
Writes a P7 x P3 grid edge list with coordinates and a small starlike SWC tree.
"""

import math
import os
import sys
from typing import Dict

from config import DATA_DIR
from graph_core import build_grid
from graph_parser import serialize_coords, serialize_edge_list

GRID_EDGES_FILE = "grid_7x3.tsv"
GRID_COORDS_FILE = "grid_7x3_coords.tsv"
STAR_SWC_FILE = "starlike.swc"

# sample spacing along each SWC branch, in micrometers
SWC_STEP = 2.5


def starlike_swc(branch_lengths=(5, 5, 5), step: float = SWC_STEP) -> str:
    """SWC text for a soma (type 1) with straight dendrite branches (type 3)."""
    lines = [
        "# starlike sample tree",
        "# id type x y z radius parent",
        "1 1 0 0 0 4.0 -1",
    ]
    sample = 1
    for b, length in enumerate(branch_lengths):
        angle = 2 * math.pi * b / len(branch_lengths)
        parent = 1
        for k in range(1, length + 1):
            sample += 1
            x = round(k * step * math.cos(angle), 6)
            y = round(k * step * math.sin(angle), 6)
            lines.append(f"{sample} 3 {x} {y} 0 0.5 {parent}")
            parent = sample
    return "\n".join(lines) + "\n"


def write_samples(directory: str = DATA_DIR) -> Dict[str, str]:
    """Write the sample files into `directory` and return their paths by name."""
    os.makedirs(directory, exist_ok=True)
    grid = build_grid(7, 3)
    contents = {
        GRID_EDGES_FILE: serialize_edge_list(grid),
        GRID_COORDS_FILE: serialize_coords(grid),
        STAR_SWC_FILE: starlike_swc(),
    }

    paths = {}
    for name, text in contents.items():
        path = os.path.join(directory, name)
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        paths[name] = path
    return paths


if __name__ == "__main__":
    target = sys.argv[1] if len(sys.argv) > 1 else DATA_DIR
    written = write_samples(target)
    print("[OK] Sample data created!")
    for name, path in written.items():
        print(f"  - {name}: {path}")
    print("\nTry:")
    print(f"  python main.py run --graph {written[GRID_EDGES_FILE]} --coords {written[GRID_COORDS_FILE]}")
    print(f"  python main.py run --swc {written[STAR_SWC_FILE]} --dim 2")
