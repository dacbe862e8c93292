"""
Step 0: turn eigenvectors into probability mass functions over the nodes.
"""

from dataclasses import dataclass
from enum import Enum
from typing import List

import numpy as np

from config import PMF_SUM_TOLERANCE
from exceptions import InvalidArgumentError
from spectral import Spectrum, require_unit_vector


class PmfKind(str, Enum):
    SQUARED = "squared"
    L1 = "l1"


@dataclass(frozen=True, eq=False)
class Pmf:
    masses: np.ndarray

    def __post_init__(self):
        masses = np.array(self.masses, dtype=float)
        if masses.ndim != 1 or masses.size == 0:
            raise InvalidArgumentError(f"pmf must be a non-empty vector, got shape {masses.shape}")
        if np.any(masses < 0):
            raise InvalidArgumentError("pmf has negative mass")
        total = masses.sum()
        if abs(total - 1.0) > PMF_SUM_TOLERANCE:
            raise InvalidArgumentError(f"pmf sums to {total!r}, not 1")
        masses.setflags(write=False)
        object.__setattr__(self, "masses", masses)

    @property
    def size(self) -> int:
        return self.masses.size

    def __len__(self):
        return self.masses.size


def _normalized(weights: np.ndarray) -> Pmf:
    return Pmf(weights / weights.sum())


def to_pmf_squared(phi: np.ndarray) -> Pmf:
    """p[x] = phi[x]^2, renormalized by its exact sum."""
    vector = require_unit_vector(phi)
    return _normalized(vector ** 2)


def to_pmf_l1(phi: np.ndarray) -> Pmf:
    """p[x] = |phi[x]| / ||phi||_1."""
    weights = np.abs(np.asarray(phi, dtype=float))
    if not weights.any():
        raise InvalidArgumentError("cannot convert the zero vector to a pmf")
    return _normalized(weights)


CONVERTERS = {
    PmfKind.SQUARED: to_pmf_squared,
    PmfKind.L1: to_pmf_l1,
}


def eigenvector_pmfs(spectrum: Spectrum, kind: PmfKind = PmfKind.SQUARED) -> List[Pmf]:
    convert = CONVERTERS[PmfKind(kind)]
    return [convert(spectrum.vector(k)) for k in range(spectrum.size)]
