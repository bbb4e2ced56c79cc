"""Per-edge kernel complexity (KC) scores.

The KC score of edge (u, v) is |GKC(H) - GKC(H_without_uv)|: how much the
label-norm complexity moves when the edge is deleted.  Two routes compute
it.  The naive route rebuilds aggregation, Gram matrix, and GKC from
scratch per edge and is the reference.  The fast route exploits that a
single removal only touches the aggregated rows of the closed
neighborhoods of u and v, so the Gram update has low rank and the new
quadratic form follows from the Woodbury identity against cached base
solves, with no refactorization.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigError,
    DegenerateFeatureError,
    GraphFormatError,
    InputError,
)
from .graph import Graph, affected_nodes, aggregate_features, format_float, remove_edge
from .kernel import arccos_kernel, gkc, gram_matrix
from .pseudolabel import LabelMatrix

#: Fast path falls back to naive when the capacitance system is worse than this.
CAPACITANCE_COND_LIMIT = 1e12


@dataclass(frozen=True)
class KcEntry:
    """Score of one edge plus the GKC of its removal and the path used."""

    score: float
    gkc_removed: float
    method: str


@dataclass
class KcScoreTable:
    """KC scores for a full edge set.

    ``entries`` maps canonical (u, v) pairs to entries; ``base_gkc`` is
    the unperturbed complexity; ``label_digest`` fingerprints the label
    matrix the scores were computed against (empty for tables re-read
    from disk, which do not carry enough to recompute it).
    """

    entries: dict
    base_gkc: float
    label_digest: str

    def sorted_edges(self) -> list:
        """Edges by score descending, ties by (u, v) ascending."""
        return sorted(
            self.entries, key=lambda e: (-self.entries[e].score, e[0], e[1])
        )

    def write_tsv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("u\tv\tkc_score\tmethod\n")
            for u, v in self.sorted_edges():
                entry = self.entries[(u, v)]
                fh.write(
                    f"{u}\t{v}\t{format_float(entry.score)}\t{entry.method}\n"
                )

    @classmethod
    def read_tsv(cls, path) -> "KcScoreTable":
        entries = {}
        with open(path, "r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line or line_no == 1:
                    continue
                parts = line.split("\t")
                if len(parts) != 4:
                    raise GraphFormatError(
                        f"{path}: line {line_no}: expected 4 columns"
                    )
                try:
                    u, v = int(parts[0]), int(parts[1])
                    score = float(parts[2])
                except ValueError:
                    raise GraphFormatError(
                        f"{path}: line {line_no}: unparseable row {line!r}"
                    ) from None
                entries[(u, v)] = KcEntry(
                    score=score, gkc_removed=float("nan"), method=parts[3]
                )
        return cls(entries=entries, base_gkc=float("nan"), label_digest="")


class ScoreCache:
    """Base-graph quantities shared by all fast per-edge evaluations.

    Holds the aggregated rows, the Gram matrix with its explicit inverse
    (one cached solve of the identity against the Cholesky factor), the
    solved label columns, and the pre-normalization neighbor sums needed
    to replay aggregation on the handful of rows an edge removal touches.
    """

    def __init__(self, g: Graph, labels: LabelMatrix):
        if labels.columns.shape[0] != g.n_nodes:
            raise InputError("label matrix does not match graph size")
        self.xt = aggregate_features(g)
        self.gm = gram_matrix(self.xt)
        self.base_gkc = gkc(self.gm, labels)
        self.label_digest = labels.digest()
        self.weights = 1.0 / np.sqrt(g.degrees.astype(np.float64))
        # Sum_{j in closed nbhd(k)} X_j / sqrt(d_j), recoverable from the
        # stored rows and their pre-normalization norms.
        self.neighbor_sums = (
            self.xt.matrix
            * self.xt.pre_norm_row_norms[:, None]
            / self.weights[:, None]
        )
        self.h_inv = None
        self.z = None
        self.quad = None
        if self.gm.ridge == 0.0:
            self.h_inv = self.gm.solve_factored(np.eye(g.n_nodes))
            self.z = self.gm.solve_factored(labels.columns)
            self.quad = np.einsum("nc,nc->c", labels.columns, self.z)
        self.columns = labels.columns
        self.fallbacks = 0
        self._lock = threading.Lock()

    def count_fallback(self) -> None:
        with self._lock:
            self.fallbacks += 1


def build_score_cache(g: Graph, labels: LabelMatrix) -> ScoreCache:
    """Precompute everything the fast path reuses across edges."""
    return ScoreCache(g, labels)


def _gkc_removed_naive(g: Graph, labels: LabelMatrix, u: int, v: int) -> float:
    reduced = remove_edge(g, u, v)
    try:
        xt = aggregate_features(reduced)
    except DegenerateFeatureError as exc:
        raise DegenerateFeatureError(
            f"removing edge ({u}, {v}) degenerates aggregation: {exc}"
        ) from None
    return gkc(gram_matrix(xt), labels).value


def kc_score_naive(g: Graph, labels: LabelMatrix, u: int, v: int) -> float:
    """Reference score: full recompute of the edge-removed complexity."""
    base = gkc(gram_matrix(aggregate_features(g)), labels).value
    return abs(base - _gkc_removed_naive(g, labels, u, v))


def _updated_rows(cache: ScoreCache, g: Graph, u: int, v: int, s: np.ndarray):
    """Aggregated rows of the affected set after removing (u, v)."""
    x = g.features
    w = cache.weights
    d_new = g.degrees.astype(np.float64).copy()
    d_new[u] -= 1.0
    d_new[v] -= 1.0
    w_new = w.copy()
    w_new[u] = 1.0 / np.sqrt(d_new[u])
    w_new[v] = 1.0 / np.sqrt(d_new[v])

    sums = cache.neighbor_sums[s].copy()
    du, dv = w_new[u] - w[u], w_new[v] - w[v]
    for k_pos, k in enumerate(s.tolist()):
        if k == u:
            sums[k_pos] += du * x[u] - w[v] * x[v]
        elif k == v:
            sums[k_pos] += dv * x[v] - w[u] * x[u]
        else:
            if g.has_edge(k, u):
                sums[k_pos] += du * x[u]
            if g.has_edge(k, v):
                sums[k_pos] += dv * x[v]
    raw = w_new[s, None] * sums
    norms = np.linalg.norm(raw, axis=1)
    if (norms < 1e-10).any():
        k = int(s[np.argmax(norms < 1e-10)])
        raise DegenerateFeatureError(
            f"removing edge ({u}, {v}) degenerates aggregation at node {k}"
        )
    return raw / norms[:, None]


def _gkc_removed_fast(cache: ScoreCache, g: Graph, u: int, v: int):
    """Woodbury update of the quadratic form; returns (value, used_fast)."""
    if cache.h_inv is None:
        return None, False
    s = affected_nodes(g, u, v)
    n, ns = g.n_nodes, s.shape[0]
    if 2 * ns >= n:
        return None, False

    new_rows = _updated_rows(cache, g, u, v, s)

    # Gram columns over the affected set, after the removal.
    dots = cache.xt.matrix @ new_rows.T
    block = new_rows @ new_rows.T
    block = (block + block.T) / 2.0
    np.fill_diagonal(block, 1.0)
    dots[s, :] = block
    m = arccos_kernel(dots) - cache.gm.h[:, s]
    b = m[s, :]
    b = (b + b.T) / 2.0

    # Delta H = W C W^T with W = [m, P_s] and C^{-1} = [[b, I], [I, 0]].
    h_inv_m = cache.h_inv @ m
    h_inv_p = cache.h_inv[:, s]
    cap = np.empty((2 * ns, 2 * ns))
    cap[:ns, :ns] = b + m.T @ h_inv_m
    cap[:ns, ns:] = np.eye(ns) + m.T @ h_inv_p
    cap[ns:, :ns] = cap[:ns, ns:].T
    cap[ns:, ns:] = h_inv_p[s, :]
    if not np.isfinite(cap).all() or np.linalg.cond(cap) > CAPACITANCE_COND_LIMIT:
        return None, False

    wt_z = np.vstack([m.T @ cache.z, cache.z[s, :]])
    correction = np.einsum("kc,kc->c", wt_z, np.linalg.solve(cap, wt_z))
    value = float(2.0 * (cache.quad - correction).sum() / n)
    return value, True


def kc_score_fast(
    g: Graph, cache: ScoreCache, labels: LabelMatrix, u: int, v: int
) -> float:
    """Low-rank update score; falls back to the naive route when the base
    needed a ridge, the affected set is too large, or the capacitance
    system is ill-conditioned."""
    if cache.label_digest != labels.digest():
        raise InputError("score cache was built for different labels")
    value, used_fast = _gkc_removed_fast(cache, g, u, v)
    if not used_fast:
        cache.count_fallback()
        value = _gkc_removed_naive(g, labels, u, v)
    return abs(cache.base_gkc.value - value)


def kc_scores_all(
    g: Graph,
    labels: LabelMatrix,
    method: str = "fast",
    threads: int = 1,
) -> KcScoreTable:
    """Score every edge of g; returns a table keyed by canonical edge.

    ``method`` picks the route; fast-path edges that had to fall back are
    tagged 'naive' in the table.  ``threads`` parallelizes over edges
    without changing any result.
    """
    if method not in ("naive", "fast"):
        raise ConfigError(f"unknown scoring method {method!r}")
    if g.n_edges == 0:
        raise ConfigError("cannot score a graph with no edges")

    cache = build_score_cache(g, labels)
    base = cache.base_gkc.value

    def score_edge(edge):
        u, v = int(edge[0]), int(edge[1])
        if method == "fast":
            value, used_fast = _gkc_removed_fast(cache, g, u, v)
            if used_fast:
                return (u, v), KcEntry(abs(base - value), value, "fast")
            cache.count_fallback()
        value = _gkc_removed_naive(g, labels, u, v)
        return (u, v), KcEntry(abs(base - value), value, "naive")

    edge_list = list(g.edges)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(score_edge, edge_list))
    else:
        results = [score_edge(e) for e in edge_list]

    return KcScoreTable(
        entries=dict(results),
        base_gkc=base,
        label_digest=cache.label_digest,
    )
