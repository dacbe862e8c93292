"""
Tests for the graph model, builders and incidence matrices.
"""

import numpy as np
import pytest

from exceptions import InvalidArgumentError
from graph_core import (
    Graph,
    build_cycle,
    build_grid,
    build_path,
    build_starlike_tree,
    edge_preference,
    incidence_matrices,
)


def test_build_path_small_cases():
    single = build_path(1)
    assert single.node_count == 1
    assert single.edge_count == 0

    p3 = build_path(3)
    assert [(u, v) for u, v, _ in p3.edges] == [(0, 1), (1, 2)]
    assert np.all(p3.edge_lengths() == 1.0)

    assert build_path(7).edge_count == 6


def test_build_path_rejects_zero():
    with pytest.raises(InvalidArgumentError):
        build_path(0)


def test_build_cycle():
    triangle = build_cycle(3)
    assert triangle.edge_count == 3
    c4 = build_cycle(4)
    assert c4.node_count == 4
    assert list(c4.degrees()) == [2, 2, 2, 2]
    # unit chord: coordinates agree with the unit lengths
    assert c4.coordinate_length_mismatches() == []

    with pytest.raises(InvalidArgumentError):
        build_cycle(2)


def test_build_grid_counts_and_indexing():
    grid = build_grid(7, 3)
    assert grid.node_count == 21
    assert grid.edge_count == 32

    # node (x, y) is y * m + x
    neighbors = {(u, v) for u, v, _ in grid.edges}
    assert (0, 1) in neighbors
    assert (0, 7) in neighbors
    assert (6, 7) not in neighbors
    assert tuple(grid.coords[9]) == (2.0, 1.0)

    unit = build_grid(1, 1)
    assert unit.node_count == 1
    assert unit.edge_count == 0


def test_build_starlike_tree():
    star = build_starlike_tree([1, 1, 1])
    assert star.node_count == 4
    assert star.edge_count == 3
    assert star.degrees()[0] == 3

    spider = build_starlike_tree([2, 2, 2])
    assert spider.node_count == 7
    assert spider.junctions() == [0]

    big = build_starlike_tree([5, 5, 5, 5])
    assert big.node_count == 21
    assert len(big.junctions()) == 1
    assert big.is_tree()

    with pytest.raises(InvalidArgumentError):
        build_starlike_tree([3, 3])


def test_graph_invariants():
    with pytest.raises(InvalidArgumentError):
        Graph(node_count=2, edges=((1, 0, 1.0),))
    with pytest.raises(InvalidArgumentError):
        Graph(node_count=2, edges=((0, 0, 1.0),))
    with pytest.raises(InvalidArgumentError):
        Graph(node_count=2, edges=((0, 1, 0.0),))
    with pytest.raises(InvalidArgumentError):
        Graph(node_count=2, edges=((0, 1, 1.0), (0, 1, 2.0)))
    with pytest.raises(InvalidArgumentError):
        Graph(node_count=2, edges=((0, 2, 1.0),))
    with pytest.raises(InvalidArgumentError):
        Graph(node_count=2, edges=(), coords=[[0.0, 0.0]])


def test_from_edges_canonicalizes_and_fills_lengths():
    g = Graph.from_edges(3, [(1, 0), (2, 1, 2.5)], coords=[[0, 0], [3, 4], [3, 5]])
    assert g.edges == ((0, 1, 5.0), (1, 2, 2.5))

    plain = Graph.from_edges(2, [(1, 0)])
    assert plain.edges == ((0, 1, 1.0),)


def test_connectivity_helpers():
    two_parts = Graph.from_edges(4, [(0, 1), (2, 3)])
    assert two_parts.component_count() == 2
    assert not two_parts.is_connected()
    assert not two_parts.is_tree()
    assert build_cycle(5).is_connected()
    assert not build_cycle(5).is_tree()


def test_incidence_p2():
    inc = incidence_matrices(build_path(2))
    assert inc.oriented().toarray().tolist() == [[-1.0], [1.0]]
    assert inc.matrix().toarray().tolist() == [[-1.0, 1.0], [1.0, -1.0]]
    assert inc.unsigned().toarray().tolist() == [[1.0], [1.0]]


def test_incidence_grid_shape_and_columns():
    grid = build_grid(7, 3)
    inc = incidence_matrices(grid)
    Q = inc.matrix().toarray()
    assert Q.shape == (21, 64)
    # every column moves one unit of mass out of its tail into its head
    assert np.allclose(Q.sum(axis=0), 0.0)
    assert np.all(np.abs(Q).sum(axis=0) == 2.0)
    # reversal columns mirror the oriented ones
    assert np.array_equal(Q[:, 32:], -Q[:, :32])
    assert np.array_equal(inc.edge_lengths[:32], inc.edge_lengths[32:])
    assert np.all(inc.tails[:32] < inc.heads[:32])


@pytest.mark.parametrize("m", [1, 2, 5, 9])
def test_single_row_grid_is_the_path(m):
    grid, path = build_grid(m, 1), build_path(m)
    assert grid.node_count == path.node_count
    assert grid.edges == path.edges
    assert np.array_equal(grid.coords, path.coords)


@pytest.mark.parametrize("g", [build_path(6), build_cycle(5), build_grid(7, 3), build_starlike_tree([2, 3, 1])])
def test_incidence_annihilates_the_all_ones_flow(g):
    inc = incidence_matrices(g)
    assert np.array_equal(inc.matrix() @ np.ones(inc.column_count), np.zeros(g.node_count))


def test_edge_preference_on_a_path():
    preference = edge_preference(build_path(5))
    # the two middle edges carry the most shortest paths
    assert preference.tolist() == [preference[3], preference[2], preference[1], preference[0]]
    assert preference[1] == preference[2] == 1.0
    assert preference[0] > preference[1]
    assert np.all((preference >= 1.0) & (preference <= 2.0))


def test_edge_preference_respects_grid_reflections():
    m, n = 7, 3
    g = build_grid(m, n)
    preference = dict(zip([(u, v) for u, v, _ in g.edges], edge_preference(g)))

    def reflect(node, flip_x, flip_y):
        x, y = node % m, node // m
        return (m - 1 - x if flip_x else x) + m * (n - 1 - y if flip_y else y)

    for flip_x, flip_y in [(True, False), (False, True), (True, True)]:
        for (u, v), value in preference.items():
            a, b = sorted((reflect(u, flip_x, flip_y), reflect(v, flip_x, flip_y)))
            assert preference[(a, b)] == value

    inc = incidence_matrices(g)
    assert np.array_equal(inc.edge_preference[: inc.m], inc.edge_preference[inc.m:])
