"""Edge pruning: strategy selection, plan application, and the full pipeline.

The pipeline clusters nodes into pseudo labels, scores every edge by its
kernel-complexity contribution, and removes the top ceil(alpha * |E|)
edges.  Alternative strategies (lowest scores first, or a seeded uniform
subset) exist as experimental controls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, StalePlanError
from .graph import Graph, with_edges
from .kcscore import KcScoreTable, kc_scores_all
from .pseudolabel import LabelMatrix, PseudoLabels, encode_labels, kmeans_pseudo_labels

STRATEGIES = ("high-kc", "low-kc", "random")


def prune_count(alpha: float, n_edges: int) -> int:
    """ceil(alpha * |E|), guarded against float-product noise."""
    return math.ceil(round(alpha * n_edges, 9))


@dataclass(frozen=True)
class PruneConfig:
    """Pruning ratio alpha in [0, 1], strategy, and seed (random only)."""

    alpha: float
    strategy: str = "high-kc"
    seed: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"unknown strategy {self.strategy!r}")
        if self.strategy == "random" and self.seed is None:
            raise ConfigError("random strategy requires a seed")


@dataclass(frozen=True)
class PrunePlan:
    """Ordered list of edges to delete plus the config that chose them."""

    removed: tuple
    k: int
    config: PruneConfig

    def write_tsv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for u, v in self.removed:
                fh.write(f"{u}\t{v}\n")


def select_edges(table: KcScoreTable, config: PruneConfig) -> PrunePlan:
    """Pick ceil(alpha * |E|) edges from the table per the strategy.

    high-kc takes the largest scores, low-kc the smallest, random a
    seeded uniform subset; score ties always break toward the
    lexicographically smaller (u, v).
    """
    n = len(table.entries)
    if n == 0 and config.alpha > 0.0:
        raise ConfigError("cannot prune from an empty score table")
    k = prune_count(config.alpha, n)
    if config.strategy == "high-kc":
        chosen = table.sorted_edges()[:k]
    elif config.strategy == "low-kc":
        chosen = sorted(
            table.entries, key=lambda e: (table.entries[e].score, e[0], e[1])
        )[:k]
    else:
        edges = sorted(table.entries)
        rng = np.random.default_rng([int(config.seed) & 0xFFFFFFFFFFFFFFFF, 0x9A])
        idx = rng.choice(n, size=k, replace=False) if k else []
        chosen = [edges[i] for i in idx]
    return PrunePlan(removed=tuple(chosen), k=k, config=config)


def apply_prune(g: Graph, plan: PrunePlan) -> Graph:
    """Delete the planned edges; every one must still be present."""
    edge_set = g.edge_set()
    missing = [e for e in plan.removed if e not in edge_set]
    if missing:
        raise StalePlanError(
            f"plan references {len(missing)} edge(s) absent from the graph, "
            f"first {missing[0]}"
        )
    doomed = set(plan.removed)
    keep = np.array(
        [tuple(e) not in doomed for e in g.edges.tolist()], dtype=bool
    )
    return with_edges(g, g.edges[keep])


@dataclass(frozen=True)
class SanitizationResult:
    """Pruned graph with every intermediate kept for audit."""

    graph: Graph
    table: KcScoreTable
    plan: PrunePlan
    pseudo_labels: PseudoLabels
    label_matrix: LabelMatrix


def kces_pipeline(
    g: Graph,
    alpha: float,
    k_clusters: int,
    seed: int,
    method: str = "fast",
    encoding: str = "one-hot",
    restarts: int = 10,
    threads: int = 1,
) -> SanitizationResult:
    """Cluster, score, and prune the highest-complexity edges.

    Pseudo labels come from K-means on normalized neighborhood sums,
    scores from the selected KC route, and the plan removes the top
    ceil(alpha * |E|) scores.
    """
    pseudo = kmeans_pseudo_labels(g, k_clusters, seed, restarts=restarts)
    labels = encode_labels(pseudo, encoding)
    table = kc_scores_all(g, labels, method=method, threads=threads)
    plan = select_edges(table, PruneConfig(alpha=alpha, strategy="high-kc"))
    return SanitizationResult(
        graph=apply_prune(g, plan),
        table=table,
        plan=plan,
        pseudo_labels=pseudo,
        label_matrix=labels,
    )
