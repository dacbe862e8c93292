"""
Graph data model, standard graph builders and incidence matrices.

Node indices are 0-based. Edges are stored once, as (u, v, length) with u < v.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
import scipy.sparse as sparse

from config import LENGTH_TOLERANCE
from exceptions import InvalidArgumentError

logger = logging.getLogger(__name__)

EdgeTuple = Tuple[int, int, float]

PREFERENCE_DIGITS = 10


def _frozen_array(values) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected, weighted, simple graph with optional node coordinates."""

    node_count: int
    edges: Tuple[EdgeTuple, ...]
    coords: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.node_count < 1:
            raise InvalidArgumentError(f"node_count must be >= 1, got {self.node_count}")

        seen = set()
        for u, v, length in self.edges:
            if u == v:
                raise InvalidArgumentError(f"self-loop at node {u}")
            if u > v:
                raise InvalidArgumentError(f"edge ({u}, {v}) is not canonical (u < v)")
            if u < 0 or v >= self.node_count:
                raise InvalidArgumentError(f"edge ({u}, {v}) outside [0, {self.node_count})")
            if not length > 0:
                raise InvalidArgumentError(f"edge ({u}, {v}) has non-positive length {length}")
            if (u, v) in seen:
                raise InvalidArgumentError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))

        if self.coords is not None:
            coords = _frozen_array(self.coords)
            if coords.ndim != 2 or coords.shape[0] != self.node_count or coords.shape[1] not in (2, 3):
                raise InvalidArgumentError(
                    f"coords must have shape ({self.node_count}, 2|3), got {coords.shape}"
                )
            object.__setattr__(self, "coords", coords)

    @classmethod
    def from_edges(
        cls,
        node_count: int,
        edges: Iterable[Sequence],
        coords: Optional[Sequence[Sequence[float]]] = None,
    ) -> "Graph":
        """
        Build a graph from (u, v) or (u, v, length) records.

        Missing lengths are the Euclidean distance between endpoints when
        coordinates are given, and 1 otherwise.
        """
        points = None if coords is None else np.asarray(coords, dtype=float)
        canonical: List[EdgeTuple] = []
        for record in edges:
            u, v = int(record[0]), int(record[1])
            length = record[2] if len(record) > 2 else None
            if u > v:
                u, v = v, u
            if length is None:
                if points is not None and 0 <= u and v < len(points):
                    length = float(np.linalg.norm(points[v] - points[u]))
                else:
                    length = 1.0
            canonical.append((u, v, float(length)))
        return cls(node_count=int(node_count), edges=tuple(canonical), coords=points)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def edge_lengths(self) -> np.ndarray:
        return np.array([length for _, _, length in self.edges], dtype=float)

    def degrees(self) -> np.ndarray:
        degrees = np.zeros(self.node_count, dtype=int)
        for u, v, _ in self.edges:
            degrees[u] += 1
            degrees[v] += 1
        return degrees

    def adjacency(self) -> np.ndarray:
        """Dense 0/1 adjacency matrix (lengths do not enter)."""
        adjacency = np.zeros((self.node_count, self.node_count))
        for u, v, _ in self.edges:
            adjacency[u, v] = adjacency[v, u] = 1.0
        return adjacency

    def edge_index(self) -> Dict[Tuple[int, int], int]:
        return {(u, v): k for k, (u, v, _) in enumerate(self.edges)}

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.node_count))
        for u, v, length in self.edges:
            graph.add_edge(u, v, length=length)
        return graph

    def component_count(self) -> int:
        return nx.number_connected_components(self.to_networkx())

    def is_connected(self) -> bool:
        return self.component_count() == 1

    def is_tree(self) -> bool:
        return self.edge_count == self.node_count - 1 and self.is_connected()

    def junctions(self) -> List[int]:
        """Nodes of degree greater than 2."""
        return [int(x) for x in np.flatnonzero(self.degrees() > 2)]

    def coordinate_length_mismatches(self) -> List[Tuple[int, int]]:
        """Edges whose length differs from the Euclidean distance of their endpoints."""
        if self.coords is None:
            return []
        mismatched = []
        for u, v, length in self.edges:
            distance = float(np.linalg.norm(self.coords[v] - self.coords[u]))
            if abs(distance - length) > LENGTH_TOLERANCE * max(1.0, distance):
                mismatched.append((u, v))
        return mismatched


@dataclass(frozen=True, eq=False)
class BidirectedIncidence:
    """
    Incidence structure of the bidirected graph.

    Column k < m orients edge k from tails[k] (-1) to heads[k] (+1);
    column m + k is its reversal. `edge_preference` ranks columns for
    choosing among equally short plans (lower is preferred, both directions
    of an edge share a value).
    """

    n: int
    m: int
    tails: np.ndarray
    heads: np.ndarray
    edge_lengths: np.ndarray = field(repr=False)
    edge_preference: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def column_count(self) -> int:
        return 2 * self.m

    def matrix(self) -> sparse.csr_matrix:
        """The signed n x 2m incidence matrix [Q~ | -Q~]."""
        columns = np.arange(self.column_count)
        rows = np.concatenate([self.tails, self.heads])
        data = np.concatenate([-np.ones(self.column_count), np.ones(self.column_count)])
        return sparse.csr_matrix(
            (data, (rows, np.concatenate([columns, columns]))),
            shape=(self.n, self.column_count),
        )

    def oriented(self) -> sparse.csr_matrix:
        """Q~: the first m columns."""
        return self.matrix()[:, : self.m]

    def unsigned(self) -> sparse.csr_matrix:
        """Q: absolute values of Q~."""
        return abs(self.oriented())


def incidence_matrices(g: Graph) -> BidirectedIncidence:
    """Orient every edge from its smaller to its larger node index and append reversals."""
    low = np.array([u for u, _, _ in g.edges], dtype=int)
    high = np.array([v for _, v, _ in g.edges], dtype=int)
    lengths = g.edge_lengths()
    tails = np.concatenate([low, high])
    heads = np.concatenate([high, low])
    for array in (tails, heads):
        array.setflags(write=False)
    preference = edge_preference(g)
    return BidirectedIncidence(
        n=g.node_count,
        m=g.edge_count,
        tails=tails,
        heads=heads,
        edge_lengths=_frozen_array(np.concatenate([lengths, lengths])),
        edge_preference=_frozen_array(np.concatenate([preference, preference])),
    )


def edge_preference(g: Graph, digits: int = PREFERENCE_DIGITS) -> np.ndarray:
    """
    Per-edge cost in [1, 2]: 1 for the edge with the highest betweenness
    (shortest paths weighted by length), 2 for edges on no shortest path.

    Rounded so that edges swapped by a graph automorphism get equal values.
    """
    if g.edge_count == 0:
        return np.zeros(0)
    betweenness = nx.edge_betweenness_centrality(g.to_networkx(), weight="length", normalized=True)
    values = np.array([betweenness.get((u, v), betweenness.get((v, u), 0.0)) for u, v, _ in g.edges])
    top = values.max()
    if top > 0:
        values = values / top
    return np.round(2.0 - values, digits)


# Standard builders

def build_path(n: int) -> Graph:
    """Path P_n with unit edges and coordinates (i, 0)."""
    if n < 1:
        raise InvalidArgumentError(f"path needs n >= 1, got {n}")
    edges = [(i, i + 1, 1.0) for i in range(n - 1)]
    coords = [(float(i), 0.0) for i in range(n)]
    return Graph(node_count=n, edges=tuple(edges), coords=coords)


def build_cycle(n: int) -> Graph:
    """Cycle C_n with unit edges; nodes evenly placed on a circle of unit chord."""
    if n < 3:
        raise InvalidArgumentError(f"cycle needs n >= 3, got {n}")
    edges = [(i, i + 1, 1.0) for i in range(n - 1)] + [(0, n - 1, 1.0)]
    radius = 1.0 / (2.0 * math.sin(math.pi / n))
    coords = [
        (radius * math.cos(2 * math.pi * i / n), radius * math.sin(2 * math.pi * i / n))
        for i in range(n)
    ]
    return Graph(node_count=n, edges=tuple(edges), coords=coords)


def build_grid(m: int, n: int) -> Graph:
    """Cartesian product P_m x P_n; node (x, y) has index y * m + x."""
    if m < 1 or n < 1:
        raise InvalidArgumentError(f"grid needs m, n >= 1, got {m}x{n}")
    edges = []
    for y in range(n):
        for x in range(m):
            node = y * m + x
            if x + 1 < m:
                edges.append((node, node + 1, 1.0))
            if y + 1 < n:
                edges.append((node, node + m, 1.0))
    coords = [(float(x), float(y)) for y in range(n) for x in range(m)]
    return Graph(node_count=m * n, edges=tuple(edges), coords=coords)


def build_starlike_tree(branch_lengths: Sequence[int]) -> Graph:
    """
    A center node (index 0) with one path per branch attached.

    Branch b occupies consecutive indices and points along angle 2*pi*b/B.
    """
    if len(branch_lengths) < 3:
        raise InvalidArgumentError(f"starlike tree needs at least 3 branches, got {len(branch_lengths)}")
    if any(int(length) < 1 for length in branch_lengths):
        raise InvalidArgumentError(f"branch lengths must be positive, got {list(branch_lengths)}")

    edges = []
    coords = [(0.0, 0.0)]
    branches = len(branch_lengths)
    for b, length in enumerate(branch_lengths):
        angle = 2 * math.pi * b / branches
        previous = 0
        for step in range(1, int(length) + 1):
            node = len(coords)
            coords.append((step * math.cos(angle), step * math.sin(angle)))
            edges.append((previous, node, 1.0))
            previous = node
    return Graph(node_count=len(coords), edges=tuple(edges), coords=coords)
