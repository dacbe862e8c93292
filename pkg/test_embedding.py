"""
Tests for classical MDS, dimension selection and the stress check.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from embedding import (
    choose_dim,
    classical_mds,
    pairwise_distances,
    procrustes_disparity,
    reconstruction_check,
)
from exceptions import EmbeddingDimensionError, InvalidArgumentError


def test_zero_matrix_collapses_to_origin():
    emb = classical_mds(np.zeros((4, 4)), 2)
    assert np.allclose(emb.points, 0.0)
    assert reconstruction_check(emb, np.zeros((4, 4))) == 0.0


def test_two_points():
    emb = classical_mds(np.array([[0.0, 2.0], [2.0, 0.0]]), 1)
    assert sorted(emb.points[:, 0].tolist()) == pytest.approx([-1.0, 1.0], abs=1e-12)


def test_equilateral_triangle():
    D = np.ones((3, 3)) - np.eye(3)
    emb = classical_mds(D, 2)
    assert np.allclose(pairwise_distances(emb.points), D, atol=1e-10)
    assert np.allclose(emb.points.mean(axis=0), 0.0, atol=1e-12)


def test_gram_eigenvalues_are_descending():
    rng = np.random.default_rng(3)
    D = pairwise_distances(rng.normal(size=(10, 3)))
    emb = classical_mds(D, 3)
    assert np.all(np.diff(emb.gram_eigenvalues) <= 1e-12)
    assert reconstruction_check(emb, D) <= 1e-8


def test_rejects_bad_inputs():
    with pytest.raises(InvalidArgumentError):
        classical_mds(np.array([[0.0, 1.0], [2.0, 0.0]]), 1)
    with pytest.raises(InvalidArgumentError):
        classical_mds(np.array([[1.0, 1.0], [1.0, 0.0]]), 1)
    with pytest.raises(InvalidArgumentError):
        classical_mds(np.ones((3, 3)) - np.eye(3), 3)
    with pytest.raises(InvalidArgumentError):
        classical_mds(np.zeros((2, 3)), 1)


def test_non_euclidean_distances_fail_when_dimension_too_high():
    # squared distances of the Gram matrix 20 w w^T - J with w ~ (3, 1, -1, -3):
    # eigenvalues 19, 0, -1, -1
    squared = np.array([
        [0.0, 2.0, 14.0, 34.0],
        [2.0, 0.0, 2.0, 14.0],
        [14.0, 2.0, 0.0, 2.0],
        [34.0, 14.0, 2.0, 0.0],
    ])
    D = np.sqrt(squared)
    gram = classical_mds(D, 1).gram_eigenvalues
    assert gram == pytest.approx([19.0, 0.0, -1.0, -1.0], abs=1e-9)
    assert classical_mds(D, 2).n0 == 2
    with pytest.raises(EmbeddingDimensionError):
        classical_mds(D, 3)


def test_choose_dim_examples():
    # (10, 9, 4, 1): two leading eigenvalues of similar size above a gap
    paired = choose_dim([10, 9, 4, 1])
    assert paired.n0 == 2
    assert not paired.fallback

    picked = choose_dim([10, 4.9, 2.4, 1])
    assert picked.n0 == 3
    assert not picked.fallback
    assert picked.gap_ratios == pytest.approx([10 / 4.9, 4.9 / 2.4, 2.4])

    flat = choose_dim([5, 4, 3.5, 3])
    assert flat.n0 == 2
    assert flat.fallback

    assert choose_dim([10, 1, 0.9, 0.8]).n0 == 1
    assert choose_dim([10, 4, 1, 0.9], dmax=1).n0 == 1


def test_choose_dim_grid_gram_spectrum():
    # top two close together, both more than twice the third
    choice = choose_dim([45.97, 44.05, 21.24, 12.0, 5.0])
    assert choice.n0 == 2
    assert not choice.fallback

    assert choose_dim([-1.0, -2.0, -9.0]).fallback


@given(
    values=st.lists(st.integers(-1000, 10000).map(lambda v: v / 100), min_size=2, max_size=8),
    scale=st.integers(-20, 20).map(lambda e: 2.0 ** e),
)
@settings(max_examples=200, deadline=None)
def test_choose_dim_ignores_positive_scaling(values, scale):
    values = sorted(values, reverse=True)
    original = choose_dim(values)
    scaled = choose_dim([scale * v for v in values])
    assert (scaled.n0, scaled.fallback) == (original.n0, original.fallback)


def test_choose_dim_errors():
    with pytest.raises(InvalidArgumentError):
        choose_dim([])
    with pytest.raises(InvalidArgumentError):
        choose_dim([1.0, 0.5], dmax=0)


def test_procrustes_ignores_rigid_motions():
    rng = np.random.default_rng(11)
    points = rng.normal(size=(8, 2))
    angle = 0.7
    rotation = np.array([[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]])
    moved = 3.0 * points @ rotation.T + np.array([5.0, -2.0])
    assert procrustes_disparity(points, moved) < 1e-12
