"""
End-to-end acceptance checks: closed-form oracles, transport properties on
random graphs, the P7 x P3 experiment and run determinism.
"""

import math
import time

import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial import Delaunay

from embedding import classical_mds, pairwise_distances
from graph_core import Graph, build_grid, build_path, build_starlike_tree, incidence_matrices
from pipeline import GraphSource, RunConfig, SourceKind, run_pipeline
from pmf import Pmf, eigenvector_pmfs
from spectral import (
    dct2_eigenpairs,
    graph_spectrum,
    grid_eigenpairs,
    grid_mode_index,
    inverse_participation_ratio,
    phase_transition_split,
)
from transport import solve_balance_lp, transport_cost, tree_flow_oracle

SEEDS = st.integers(0, 2**32 - 1)


def random_tree(rng, n):
    """Random labelled tree with lengths in [0.5, 2]."""
    order = rng.permutation(n)
    edges = [
        (int(order[int(rng.integers(0, i))]), int(order[i]), float(rng.uniform(0.5, 2.0)))
        for i in range(1, n)
    ]
    return Graph.from_edges(n, edges)


def random_connected_graph(rng, n):
    tree = random_tree(rng, n)
    present = {(u, v) for u, v, _ in tree.edges}
    edges = list(tree.edges)
    for _ in range(int(rng.integers(0, n + 1))):
        u, v = sorted(int(x) for x in rng.choice(n, size=2, replace=False))
        if (u, v) not in present:
            present.add((u, v))
            edges.append((u, v, float(rng.uniform(0.5, 2.0))))
    return Graph.from_edges(n, edges)


def random_pmf(rng, n):
    weights = rng.uniform(0.05, 1.0, size=n)
    return Pmf(weights / weights.sum())


def test_path_spectra_match_dct2():
    started = time.perf_counter()
    for n in range(2, 65):
        computed = graph_spectrum(build_path(n))
        analytic = dct2_eigenpairs(n)
        assert np.allclose(computed.eigenvalues, analytic.eigenvalues, rtol=0.0, atol=1e-8)
        overlaps = np.abs(np.sum(computed.eigenvectors * analytic.eigenvectors, axis=0))
        assert np.allclose(overlaps, 1.0, rtol=0.0, atol=1e-8)
    assert time.perf_counter() - started < 5.0


def test_grid_ordering_anomaly():
    analytic, modes = grid_eigenpairs(7, 3)
    computed = graph_spectrum(build_grid(7, 3))
    assert np.allclose(computed.eigenvalues, analytic.eigenvalues, rtol=0.0, atol=1e-8)
    assert modes[:5] == [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1)]


@given(seed=SEEDS)
@settings(max_examples=200, deadline=None)
def test_lp_matches_tree_oracle(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 51))
    tree = random_tree(rng, n)
    inc = incidence_matrices(tree)
    p_i, p_j = random_pmf(rng, n), random_pmf(rng, n)

    plan = solve_balance_lp(inc, p_i, p_j)
    oracle = tree_flow_oracle(tree, p_i, p_j)
    assert plan.objective_l1 == pytest.approx(oracle.objective_l1, abs=1e-7)
    for alpha in (0.0, 0.5, 1.0):
        assert transport_cost(plan, inc.edge_lengths, alpha) == pytest.approx(
            transport_cost(oracle, inc.edge_lengths, alpha), abs=1e-6
        )


@given(seed=SEEDS)
@settings(max_examples=200, deadline=None)
def test_lp_plan_contract_on_connected_graphs(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 31))
    g = random_connected_graph(rng, n)
    inc = incidence_matrices(g)
    p_i, p_j = random_pmf(rng, n), random_pmf(rng, n)

    forward = solve_balance_lp(inc, p_i, p_j)
    flows = forward.flows
    assert np.abs(inc.matrix() @ flows - (p_j.masses - p_i.masses)).max() <= 1e-9
    assert flows.min() >= 0.0
    assert np.all(np.minimum(flows[: inc.m], flows[inc.m:]) == 0.0)

    backward = solve_balance_lp(inc, p_j, p_i)
    assert forward.objective_l1 == pytest.approx(backward.objective_l1, abs=1e-7)

    assert not solve_balance_lp(inc, p_i, p_i).flows.any()


def test_squared_pmf_identities_on_paths():
    for n in range(2, 33):
        pmfs = eigenvector_pmfs(graph_spectrum(build_path(n)))
        for p in pmfs:
            assert abs(p.masses.sum() - 1.0) <= 1e-12
        for k in range(1, n):
            assert np.allclose(pmfs[k].masses + pmfs[n - k].masses, 2.0 / n, rtol=0.0, atol=1e-10)


@pytest.fixture(scope="module")
def grid_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("grid7x3")
    cfg = RunConfig(
        graph_source=GraphSource(kind=SourceKind.GRID, spec="7x3"),
        alpha=0.5,
        n0="auto",
        output_dir=str(out),
    )
    started = time.perf_counter()
    manifest = run_pipeline(cfg)
    elapsed = time.perf_counter() - started
    return cfg, manifest, out, elapsed


def test_grid_experiment(grid_run):
    _, manifest, out, elapsed = grid_run
    assert elapsed < 60.0

    gram = manifest.gram_eigenvalues
    assert gram[0] > 2 * gram[2]
    assert gram[1] > 2 * gram[2]
    assert manifest.n0 == 2
    assert not manifest.dim_fallback
    assert manifest.max_asymmetry <= 1e-12

    embedding = pd.read_csv(out / "embedding.csv")
    points = embedding[["x0", "x1"]].to_numpy()
    assert len(points) == 21

    # the DC vector sits inside the cloud of the other eigenvectors
    assert Delaunay(points[1:]).find_simplex(points[0]) >= 0

    # (k, 0) and (7 - k, 0) are equidistant from the DC vector
    _, modes = grid_eigenpairs(7, 3)
    for k in range(1, 4):
        near = np.linalg.norm(points[grid_mode_index(modes, (k, 0))] - points[0])
        far = np.linalg.norm(points[grid_mode_index(modes, (7 - k, 0))] - points[0])
        assert abs(near - far) <= 0.05 * max(near, far)


def test_grid_runs_are_deterministic(grid_run, tmp_path):
    cfg, first, out, _ = grid_run
    second = run_pipeline(cfg.model_copy(update={"output_dir": str(tmp_path)}))
    for name in ("distance.csv", "embedding.csv", "spectrum.csv"):
        assert (out / name).read_bytes() == (tmp_path / name).read_bytes()
    assert first.gram_eigenvalues == second.gram_eigenvalues


def test_starlike_phase_transition():
    spectrum = graph_spectrum(build_starlike_tree([5, 5, 5]))
    split = phase_transition_split(spectrum)
    assert spectrum.size == 16
    assert split.high_indices == [15]
    assert spectrum.eigenvalues[14] < 4.0 < spectrum.eigenvalues[15]

    ipr = [inverse_participation_ratio(spectrum.vector(k)) for k in range(spectrum.size)]
    low_median = float(np.median([ipr[k] for k in split.low_indices]))
    assert all(ipr[k] > low_median for k in split.high_indices)


@given(seed=SEEDS, dimension=st.integers(1, 3))
@settings(max_examples=100, deadline=None)
def test_mds_recovers_euclidean_distances(seed, dimension):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(dimension + 2, 31))
    points = rng.uniform(-1.0, 1.0, size=(n, dimension))
    D = pairwise_distances(points)
    emb = classical_mds(D, dimension)
    assert np.abs(pairwise_distances(emb.points) - D).max() <= 1e-8


def test_mds_small_exact_cases():
    two = classical_mds(np.array([[0.0, 2.0], [2.0, 0.0]]), 1)
    assert sorted(two.points[:, 0].tolist()) == pytest.approx([-1.0, 1.0], abs=1e-12)

    triangle = np.ones((3, 3)) - np.eye(3)
    recovered = pairwise_distances(classical_mds(triangle, 2).points)
    assert np.abs(recovered - triangle).max() <= 1e-10
    assert math.isclose(recovered[0, 1], 1.0, abs_tol=1e-10)
