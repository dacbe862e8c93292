"""
Graph validation module: checks an input graph is usable by the pipeline.
"""

import logging
from typing import List, Optional, Tuple

from config import MAX_DENSE_NODES
from exceptions import DisconnectedGraphError
from graph_core import Graph

logger = logging.getLogger(__name__)


class GraphValidator:
    """Validates graphs before the spectral and transport stages."""

    def __init__(self, max_dense_nodes: int = MAX_DENSE_NODES):
        self.max_dense_nodes = max_dense_nodes

    def validate_size(self, g: Graph) -> Tuple[bool, Optional[str]]:
        """Need at least two eigenvectors to compare."""
        if g.node_count < 2:
            return False, f"graph has {g.node_count} node; at least 2 are needed"
        return True, None

    def validate_connectivity(self, g: Graph) -> Tuple[bool, Optional[str]]:
        """Transport between components is infeasible."""
        components = g.component_count()
        if components != 1:
            return False, f"graph is disconnected ({components} components)"
        return True, None

    def validate_coordinates(self, g: Graph) -> Tuple[bool, Optional[str]]:
        """Coordinates are optional; when present, explicit lengths may differ from them."""
        mismatched = g.coordinate_length_mismatches()
        if mismatched:
            return False, f"{len(mismatched)} edge length(s) differ from coordinate distances, e.g. {mismatched[0]}"
        return True, None

    def validate_graph(self, g: Graph) -> Tuple[bool, List[str], List[str]]:
        """Validate a graph for the full pipeline."""
        errors = []
        warnings = []

        for check in (self.validate_size, self.validate_connectivity):
            is_valid, error = check(g)
            if not is_valid:
                errors.append(error)

        is_valid, warning = self.validate_coordinates(g)
        if not is_valid:
            warnings.append(warning)

        if g.node_count > self.max_dense_nodes:
            warnings.append(
                f"{g.node_count} nodes exceeds {self.max_dense_nodes}; dense eigensolver and "
                f"{g.node_count * (g.node_count - 1)} LP solves will be slow"
            )

        return len(errors) == 0, errors, warnings

    def require_connected(self, g: Graph) -> None:
        """Raise DisconnectedGraphError unless g is connected."""
        components = g.component_count()
        if components != 1:
            raise DisconnectedGraphError(components)
