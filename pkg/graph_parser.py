"""
Parsers for graph files: whitespace edge lists (with an optional coordinates
companion) and SWC neuron morphologies.

Edge list: one edge per line, `u v [length]`, `#` starts a comment.
Coordinates: one node per line, `id x y [z]`.
SWC: `id type x y z radius parent`, parent -1 for the root.
"""

import logging
import re
from typing import Dict, List, Optional, Tuple

import networkx as nx
import numpy as np

from exceptions import GraphFormatError, InvalidArgumentError
from graph_core import Graph

logger = logging.getLogger(__name__)

COMMENT_PATTERN = re.compile(r"#.*$")
INTEGER_PATTERN = re.compile(r"^[+-]?\d+$")


def _data_lines(text: str):
    """Yield (line_number, tokens) for every non-blank, non-comment line."""
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = COMMENT_PATTERN.sub("", raw).strip()
        if line:
            yield line_number, line.split()


def _parse_int(token: str, what: str, line_number: int) -> int:
    if not INTEGER_PATTERN.match(token):
        raise GraphFormatError(f"{what} must be an integer, got {token!r}", line_number)
    return int(token)


def _parse_float(token: str, what: str, line_number: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise GraphFormatError(f"{what} must be a number, got {token!r}", line_number) from None
    if not np.isfinite(value):
        raise GraphFormatError(f"{what} must be finite, got {token!r}", line_number)
    return value


def parse_coordinates(text: str) -> Dict[int, Tuple[float, ...]]:
    """Parse an `id x y [z]` coordinates file."""
    coords: Dict[int, Tuple[float, ...]] = {}
    dimension = None
    for line_number, tokens in _data_lines(text):
        if len(tokens) not in (3, 4):
            raise GraphFormatError(f"expected 'id x y [z]', got {len(tokens)} fields", line_number)
        node = _parse_int(tokens[0], "node id", line_number)
        if node < 0:
            raise GraphFormatError(f"node id must be >= 0, got {node}", line_number)
        if node in coords:
            raise GraphFormatError(f"duplicate coordinates for node {node}", line_number)
        point = tuple(_parse_float(t, "coordinate", line_number) for t in tokens[1:])
        if dimension is None:
            dimension = len(point)
        elif len(point) != dimension:
            raise GraphFormatError(f"expected {dimension} coordinates, got {len(point)}", line_number)
        coords[node] = point
    return coords


def parse_edge_list(text: str, coords_text: Optional[str] = None) -> Graph:
    """
    Parse an edge list into a Graph.

    Node count is one more than the largest id seen in either file. Missing
    lengths come from coordinates when present, else default to 1.
    Disconnected graphs are accepted here; the pipeline rejects them.
    """
    coords = parse_coordinates(coords_text) if coords_text is not None else None

    records: List[Tuple[int, int, Optional[float]]] = []
    seen = set()
    max_id = -1
    for line_number, tokens in _data_lines(text):
        if len(tokens) not in (2, 3):
            raise GraphFormatError(f"expected 'u v [length]', got {len(tokens)} fields", line_number)
        u = _parse_int(tokens[0], "node id", line_number)
        v = _parse_int(tokens[1], "node id", line_number)
        if u < 0 or v < 0:
            raise GraphFormatError(f"node ids must be >= 0, got ({u}, {v})", line_number)
        if u == v:
            raise GraphFormatError(f"self-loop at node {u}", line_number)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphFormatError(f"duplicate edge {key}", line_number)
        seen.add(key)
        length = None
        if len(tokens) == 3:
            length = _parse_float(tokens[2], "length", line_number)
            if length <= 0:
                raise GraphFormatError(f"length must be > 0, got {length}", line_number)
        elif coords is not None and (u not in coords or v not in coords):
            raise GraphFormatError(f"edge ({u}, {v}) has no length and no coordinates", line_number)
        records.append((u, v, length))
        max_id = max(max_id, u, v)

    if coords:
        max_id = max(max_id, max(coords))
    if max_id < 0:
        raise GraphFormatError("edge list contains no nodes")
    node_count = max_id + 1

    points = None
    if coords is not None:
        missing = [x for x in range(node_count) if x not in coords]
        if missing:
            raise GraphFormatError(f"coordinates missing for nodes {missing[:5]}")
        points = [coords[x] for x in range(node_count)]

    edges = []
    for u, v, length in records:
        edges.append((u, v) if length is None else (u, v, length))
    try:
        graph = Graph.from_edges(node_count, edges, coords=points)
    except InvalidArgumentError as e:
        raise GraphFormatError(str(e)) from e
    logger.info(f"Parsed edge list: {graph.node_count} nodes, {graph.edge_count} edges")
    return graph


def parse_swc(text: str, coordinate_lengths: bool = True) -> Graph:
    """
    Parse an SWC morphology into a tree.

    Sample ids may be arbitrary positive integers; they are compacted to
    0-based indices in first-seen order. Parents may appear after children.
    """
    index: Dict[int, int] = {}
    points: List[Tuple[float, float, float]] = []
    parents: List[Tuple[int, int, int]] = []  # (child index, parent id, line number)
    lines: List[int] = []
    root = -1
    root_line = None

    for line_number, tokens in _data_lines(text):
        if len(tokens) != 7:
            raise GraphFormatError(f"expected 7 SWC fields, got {len(tokens)}", line_number)
        sample = _parse_int(tokens[0], "sample id", line_number)
        _parse_int(tokens[1], "structure type", line_number)
        x, y, z, radius = (_parse_float(t, "geometry", line_number) for t in tokens[2:6])
        parent = _parse_int(tokens[6], "parent id", line_number)
        if sample < 1:
            raise GraphFormatError(f"sample id must be positive, got {sample}", line_number)
        if sample in index:
            raise GraphFormatError(f"duplicate sample id {sample}", line_number)
        if radius < 0:
            raise GraphFormatError(f"radius must be >= 0, got {radius}", line_number)

        node = len(points)
        index[sample] = node
        points.append((x, y, z))
        lines.append(line_number)
        if parent == -1:
            if root_line is not None:
                raise GraphFormatError(f"second root (first root on line {root_line})", line_number)
            root_line = line_number
            root = node
        else:
            parents.append((node, parent, line_number))

    if not points:
        raise GraphFormatError("SWC file contains no samples")
    if root_line is None:
        raise GraphFormatError("SWC file has no root (parent -1)")

    coords = np.array(points)
    edges = []
    for node, parent, line_number in parents:
        if parent not in index:
            raise GraphFormatError(f"parent {parent} does not exist", line_number)
        other = index[parent]
        if other == node:
            raise GraphFormatError("sample is its own parent", line_number)
        if coordinate_lengths:
            length = float(np.linalg.norm(coords[node] - coords[other]))
            if length <= 0:
                raise GraphFormatError("zero-length segment (coincident with parent)", line_number)
        else:
            length = 1.0
        edges.append((other, node, length))

    # one root and n-1 parent links: a tree exactly when connected;
    # every component missing the root closes a cycle
    check = nx.Graph()
    check.add_nodes_from(range(len(points)))
    check.add_edges_from((u, v) for u, v, _ in edges)
    if not nx.is_connected(check):
        detached = [c for c in nx.connected_components(check) if root not in c]
        first = min(min(c) for c in detached)
        raise GraphFormatError("parent links form a cycle", lines[first])

    graph = Graph.from_edges(len(points), edges, coords=coords)
    logger.info(f"Parsed SWC: {graph.node_count} samples, {len(graph.junctions())} junctions")
    return graph


def _format_float(value: float) -> str:
    return f"{value:.17g}"


def serialize_edge_list(g: Graph) -> str:
    """Inverse of parse_edge_list for the edge part; lengths keep 17 significant digits."""
    lines = [f"# nodes {g.node_count} edges {g.edge_count}"]
    lines.extend(f"{u} {v} {_format_float(length)}" for u, v, length in g.edges)
    return "\n".join(lines) + "\n"


def serialize_coords(g: Graph) -> str:
    """Inverse of parse_coordinates."""
    if g.coords is None:
        raise InvalidArgumentError("graph has no coordinates")
    lines = [
        " ".join([str(node)] + [_format_float(float(c)) for c in point])
        for node, point in enumerate(g.coords)
    ]
    return "\n".join(lines) + "\n"
