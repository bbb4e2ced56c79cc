"""Structure-aware pseudo labels via K-means, plus label encodings.

Clustering runs on row-normalized (A + I) X: neighborhood sums without
degree weighting, each row rescaled to unit norm.  Lloyd's algorithm with
k-means++ seeding, several independently seeded restarts, and empty-
cluster re-seeding keeps the result deterministic for a given
(graph, K, seed) triple.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import (
    BoundedLabelError,
    DegenerateClusteringError,
    DegenerateFeatureError,
    EncodingError,
    InfeasibleKError,
)
from .graph import Graph, _readonly

MAX_LLOYD_ITERATIONS = 300
CENTROID_SHIFT_TOL = 1e-6

ENCODINGS = ("one-hot", "signed-binary", "scalar-truth")


@dataclass(frozen=True)
class PseudoLabels:
    """Best-of-restarts clustering: assignments in 0..k-1, final inertia."""

    assignments: np.ndarray
    k: int
    inertia: float
    seed: int


@dataclass(frozen=True)
class LabelMatrix:
    """Real-valued label columns fed to the complexity functional.

    ``columns`` is N x C; the complexity of a multi-column matrix is the
    sum over columns.  ``encoding`` records how the columns were built.
    """

    columns: np.ndarray
    encoding: str

    @property
    def n_columns(self) -> int:
        return self.columns.shape[1]

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(self.encoding.encode())
        h.update(np.ascontiguousarray(self.columns).tobytes())
        h.update(str(self.columns.shape).encode())
        return h.hexdigest()


def _cluster_inputs(g: Graph) -> np.ndarray:
    raw = g.adjacency_with_self_loops() @ g.features
    norms = np.linalg.norm(raw, axis=1)
    if (norms < 1e-10).any():
        i = int(np.argmax(norms < 1e-10))
        raise DegenerateFeatureError(
            f"neighborhood feature sum vanishes at node {i}"
        )
    return raw / norms[:, None]


def _sq_dists(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d2 = (
        (x * x).sum(axis=1)[:, None]
        - 2.0 * (x @ centers.T)
        + (centers * centers).sum(axis=1)[None, :]
    )
    return np.maximum(d2, 0.0)


def _kmeanspp(x: np.ndarray, k: int, rng) -> np.ndarray:
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]))
    centers[0] = x[rng.integers(n)]
    d2 = _sq_dists(x, centers[:1])[:, 0]
    for j in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centers[j] = x[idx]
        d2 = np.minimum(d2, _sq_dists(x, centers[j : j + 1])[:, 0])
    return centers


def _lloyd(x: np.ndarray, k: int, rng):
    """One seeded Lloyd run.

    Returns (assignments, inertia, inertia history).  Empty clusters are
    re-seeded to the point currently farthest from its centroid, which
    can only lower the objective, so the history is non-increasing.
    """
    centers = _kmeanspp(x, k, rng)
    n = x.shape[0]
    history = []
    assign = None
    for _ in range(MAX_LLOYD_ITERATIONS):
        d2 = _sq_dists(x, centers)
        assign = np.argmin(d2, axis=1)
        contrib = d2[np.arange(n), assign]
        for cid in range(k):
            if not (assign == cid).any():
                p = int(np.argmax(contrib))
                centers[cid] = x[p]
                assign[p] = cid
                contrib[p] = 0.0
        new_centers = centers.copy()
        for cid in range(k):
            members = assign == cid
            if members.any():
                new_centers[cid] = x[members].mean(axis=0)
        shift = np.max(np.linalg.norm(new_centers - centers, axis=1))
        centers = new_centers
        inertia = float(
            ((x - centers[assign]) ** 2).sum()
        )
        history.append(inertia)
        if shift < CENTROID_SHIFT_TOL:
            break
    d2 = _sq_dists(x, centers)
    assign = np.argmin(d2, axis=1)
    if len(np.unique(assign)) < k:
        raise DegenerateClusteringError(
            f"could not keep {k} non-empty clusters"
        )
    inertia = float(d2[np.arange(n), assign].sum())
    return assign.astype(np.int64), inertia, history


def kmeans_pseudo_labels(
    g: Graph, k: int, seed: int, restarts: int = 10
) -> PseudoLabels:
    """Cluster nodes on normalized neighborhood sums.

    Runs ``restarts`` independent Lloyd runs with seeds derived from
    (seed, restart index) and keeps the lowest-inertia assignment, ties
    resolved toward the lowest restart index.
    """
    if k < 1 or k > g.n_nodes:
        raise InfeasibleKError(f"k={k} infeasible for {g.n_nodes} nodes")
    if restarts < 1:
        raise InfeasibleKError("need at least one restart")
    x = _cluster_inputs(g)
    if k > 1 and np.unique(x, axis=0).shape[0] < k:
        raise DegenerateClusteringError(
            f"only {np.unique(x, axis=0).shape[0]} distinct rows for k={k}"
        )
    best = None
    for r in range(restarts):
        rng = np.random.default_rng(
            [int(seed) & 0xFFFFFFFFFFFFFFFF, r]
        )
        assign, inertia, _ = _lloyd(x, k, rng)
        if best is None or inertia < best[0]:
            best = (inertia, r, assign)
    return PseudoLabels(
        assignments=_readonly(best[2]), k=k, inertia=best[0], seed=seed
    )


def encode_labels(source, encoding: str) -> LabelMatrix:
    """Build a label matrix from pseudo labels or ground-truth values.

    one-hot: K binary columns from integer assignments.
    signed-binary: single +1/-1 column, exactly two classes.
    scalar-truth: single pass-through column of reals, each in [-1, 1].
    """
    if encoding not in ENCODINGS:
        raise EncodingError(f"unknown encoding {encoding!r}")

    if encoding == "scalar-truth":
        if isinstance(source, PseudoLabels):
            raise EncodingError("scalar-truth requires ground-truth values")
        y = np.asarray(source, dtype=np.float64)
        if y.ndim != 1:
            raise EncodingError("scalar-truth labels must be a vector")
        if (np.abs(y) > 1.0).any():
            raise BoundedLabelError("scalar labels must lie in [-1, 1]")
        return LabelMatrix(columns=_readonly(y[:, None]), encoding=encoding)

    if isinstance(source, PseudoLabels):
        assign, k = source.assignments, source.k
    else:
        assign = np.asarray(source)
        if assign.dtype.kind not in "iu":
            raise EncodingError(f"{encoding} requires integer labels")
        assign = assign.astype(np.int64)
        if assign.size and assign.min() < 0:
            raise EncodingError("labels must be non-negative")
        k = int(assign.max()) + 1 if assign.size else 0

    if encoding == "one-hot":
        cols = np.zeros((assign.shape[0], k))
        cols[np.arange(assign.shape[0]), assign] = 1.0
        return LabelMatrix(columns=_readonly(cols), encoding=encoding)

    # signed-binary
    if k != 2:
        raise EncodingError(f"signed-binary needs exactly 2 classes, got {k}")
    col = np.where(assign == 0, 1.0, -1.0)
    return LabelMatrix(columns=_readonly(col[:, None]), encoding=encoding)
