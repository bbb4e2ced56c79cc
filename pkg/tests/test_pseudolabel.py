"""K-means pseudo-labeling and label encodings."""

import numpy as np
import pytest

from helpers import oracle_kmeans_best_inertia

from kces.errors import (
    BoundedLabelError,
    DegenerateClusteringError,
    EncodingError,
    InfeasibleKError,
)
from kces.graph import Graph
from kces.pseudolabel import (
    _cluster_inputs,
    _lloyd,
    PseudoLabels,
    encode_labels,
    kmeans_pseudo_labels,
)
from kces.synth import random_graph


def _separated_graph(seed, n=10, spread=0.05):
    # two feature blobs far apart; edges only inside each half
    rng = np.random.default_rng(seed)
    half = n // 2
    x = np.vstack(
        [
            [4.0, 0.0] + spread * rng.standard_normal((half, 2)),
            [-4.0, 0.0] + spread * rng.standard_normal((n - half, 2)),
        ]
    )
    edges = [(i, i + 1) for i in range(half - 1)]
    edges += [(i, i + 1) for i in range(half, n - 1)]
    truth = np.array([0] * half + [1] * (n - half))
    return Graph(features=x, edges=edges), truth


def test_recovers_separated_blocks_and_global_optimum():
    for seed in range(8):
        g, truth = _separated_graph(seed)
        pl = kmeans_pseudo_labels(g, 2, seed)
        same = (pl.assignments == truth).all() or (pl.assignments == 1 - truth).all()
        assert same, f"seed {seed}: wrong partition {pl.assignments}"
        best = oracle_kmeans_best_inertia(_cluster_inputs(g), k=2)
        assert pl.inertia <= best + 1e-9, f"seed {seed}: inertia above exhaustive optimum"
        assert pl.inertia >= best - 1e-9, f"seed {seed}: inertia below exhaustive optimum"


def test_cluster_inputs_are_unit_neighborhood_sums():
    g = random_graph(n=8, edge_prob=0.4, n_features=3, seed=3)
    x = _cluster_inputs(g)
    n = g.n_nodes
    a = np.eye(n)
    for u, v in g.edges.tolist():
        a[u, v] = a[v, u] = 1.0
    raw = a @ g.features  # plain sums: no degree weighting before k-means
    expected = raw / np.linalg.norm(raw, axis=1)[:, None]
    assert np.allclose(x, expected, atol=1e-12)


def test_lloyd_history_is_non_increasing():
    for seed in range(10):
        g = random_graph(n=16, edge_prob=0.25, n_features=4, seed=40 + seed)
        x = _cluster_inputs(g)
        rng = np.random.default_rng(seed)
        _, inertia, history = _lloyd(x, 3, rng)
        diffs = np.diff(history)
        assert (diffs <= 1e-12).all(), f"seed {seed}: history increased {history}"
        assert np.isclose(history[-1], inertia, rtol=1e-9)


def test_determinism_and_restart_tiebreak():
    g = random_graph(n=12, edge_prob=0.3, n_features=4, seed=9)
    a = kmeans_pseudo_labels(g, 3, seed=5)
    b = kmeans_pseudo_labels(g, 3, seed=5)
    assert (a.assignments == b.assignments).all()
    assert a.inertia == b.inertia
    # more restarts can only improve (or match) the kept objective
    few = kmeans_pseudo_labels(g, 3, seed=5, restarts=1)
    many = kmeans_pseudo_labels(g, 3, seed=5, restarts=10)
    assert many.inertia <= few.inertia + 1e-12


def test_every_cluster_non_empty():
    for seed in range(6):
        g = random_graph(n=15, edge_prob=0.3, n_features=4, seed=60 + seed)
        for k in (2, 3, 4):
            pl = kmeans_pseudo_labels(g, k, seed)
            assert np.unique(pl.assignments).size == k


def test_infeasible_and_degenerate_inputs():
    g = random_graph(n=6, edge_prob=0.5, n_features=3, seed=1)
    with pytest.raises(InfeasibleKError):
        kmeans_pseudo_labels(g, 0, seed=0)
    with pytest.raises(InfeasibleKError):
        kmeans_pseudo_labels(g, 7, seed=0)
    with pytest.raises(InfeasibleKError):
        kmeans_pseudo_labels(g, 2, seed=0, restarts=0)
    # identical rows cannot support 2 distinct clusters
    flat = Graph(features=np.ones((4, 2)), edges=[(0, 1), (2, 3)])
    with pytest.raises(DegenerateClusteringError):
        kmeans_pseudo_labels(flat, 2, seed=0)


def test_one_hot_encoding():
    pl = PseudoLabels(assignments=np.array([0, 2, 1, 2]), k=3, inertia=0.0, seed=0)
    lm = encode_labels(pl, "one-hot")
    assert lm.columns.shape == (4, 3)
    assert lm.n_columns == 3
    assert np.array_equal(lm.columns.sum(axis=1), np.ones(4))
    assert np.array_equal(np.argmax(lm.columns, axis=1), pl.assignments)


def test_signed_binary_encoding():
    pl = PseudoLabels(assignments=np.array([0, 1, 1, 0]), k=2, inertia=0.0, seed=0)
    lm = encode_labels(pl, "signed-binary")
    assert lm.columns.shape == (4, 1)
    assert lm.columns[:, 0].tolist() == [1.0, -1.0, -1.0, 1.0]
    three = PseudoLabels(assignments=np.array([0, 1, 2]), k=3, inertia=0.0, seed=0)
    with pytest.raises(EncodingError):
        encode_labels(three, "signed-binary")


def test_scalar_truth_encoding():
    lm = encode_labels(np.array([0.5, -1.0, 0.0]), "scalar-truth")
    assert lm.columns.shape == (3, 1)
    with pytest.raises(BoundedLabelError):
        encode_labels(np.array([0.5, 1.5]), "scalar-truth")
    pl = PseudoLabels(assignments=np.array([0, 1]), k=2, inertia=0.0, seed=0)
    with pytest.raises(EncodingError):
        encode_labels(pl, "scalar-truth")
    with pytest.raises(EncodingError):
        encode_labels(np.array([0.0]), "no-such-encoding")


def test_label_digest_tracks_content():
    a = encode_labels(np.array([0, 1, 0]), "one-hot")
    b = encode_labels(np.array([0, 1, 0]), "one-hot")
    c = encode_labels(np.array([0, 1, 1]), "one-hot")
    d = encode_labels(np.array([0, 1, 0]), "signed-binary")
    assert a.digest() == b.digest()
    assert a.digest() != c.digest()
    assert a.digest() != d.digest(), "encoding tag is part of the fingerprint"
