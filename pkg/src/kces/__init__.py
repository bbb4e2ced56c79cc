"""kces: kernel complexity-based edge scoring and sanitization.

Score every edge of a node-attributed graph by how much its removal
changes the graph kernel complexity of the label vector, prune the
highest-scoring edges, and validate the kernel-regime generalization
story with a reference two-layer trainer.
"""

from .dist import DistributionExport, score_distribution, write_distribution_csv
from .errors import (
    BoundedLabelError,
    BudgetError,
    ConfigError,
    DegenerateClusteringError,
    DegenerateFeatureError,
    DegenerateSplitError,
    DivergenceError,
    EdgeRangeError,
    EncodingError,
    GraphFormatError,
    IllConditionedError,
    InfeasibleKError,
    InputError,
    KcesError,
    KcesWarning,
    MissingEdgeError,
    NumericError,
    SelfLoopError,
    StalePlanError,
)
from .gnn import (
    AccuracyReport,
    ModelState,
    SpectralPrediction,
    Split,
    TrainConfig,
    TrainTrace,
    edge_bound,
    evaluate_classifier,
    forward,
    init_model,
    make_split,
    resolve_eta,
    spectral_predictor,
    test_bound,
    train_gd,
    write_trace_csv,
)
from .graph import (
    AggregatedFeatures,
    Graph,
    aggregate_features,
    affected_nodes,
    load_graph,
    remove_edge,
    with_edges,
    write_edge_tsv,
    write_features_csv,
    write_labels,
)
from .kcscore import (
    KcEntry,
    KcScoreTable,
    ScoreCache,
    build_score_cache,
    kc_score_fast,
    kc_score_naive,
    kc_scores_all,
)
from .kernel import (
    GkcValue,
    GramMatrix,
    arccos_kernel,
    gkc,
    gram_from_matrix,
    gram_matrix,
    load_gram,
    min_eigenvalue,
    save_gram,
    solve_spd,
)
from .manifest import RunManifest, VERSION, build_manifest, load_manifest, write_manifest
from .perturb import (
    PerturbationRecord,
    apply_record,
    dice_attack,
    random_attack,
    read_record_tsv,
    revert_record,
)
from .pseudolabel import LabelMatrix, PseudoLabels, encode_labels, kmeans_pseudo_labels
from .sanitize import (
    PruneConfig,
    PrunePlan,
    SanitizationResult,
    apply_prune,
    kces_pipeline,
    prune_count,
    select_edges,
)
from .synth import make_sbm_benchmark, random_graph

__version__ = VERSION

__all__ = [
    "AccuracyReport",
    "AggregatedFeatures",
    "BoundedLabelError",
    "BudgetError",
    "ConfigError",
    "DegenerateClusteringError",
    "DegenerateFeatureError",
    "DegenerateSplitError",
    "DistributionExport",
    "DivergenceError",
    "EdgeRangeError",
    "EncodingError",
    "GkcValue",
    "GramMatrix",
    "Graph",
    "GraphFormatError",
    "IllConditionedError",
    "InfeasibleKError",
    "InputError",
    "KcEntry",
    "KcScoreTable",
    "KcesError",
    "KcesWarning",
    "LabelMatrix",
    "MissingEdgeError",
    "ModelState",
    "NumericError",
    "PerturbationRecord",
    "PruneConfig",
    "PrunePlan",
    "PseudoLabels",
    "RunManifest",
    "SanitizationResult",
    "ScoreCache",
    "SelfLoopError",
    "SpectralPrediction",
    "Split",
    "StalePlanError",
    "TrainConfig",
    "TrainTrace",
    "VERSION",
    "affected_nodes",
    "aggregate_features",
    "apply_prune",
    "apply_record",
    "arccos_kernel",
    "build_manifest",
    "build_score_cache",
    "dice_attack",
    "edge_bound",
    "encode_labels",
    "evaluate_classifier",
    "forward",
    "gkc",
    "gram_from_matrix",
    "gram_matrix",
    "init_model",
    "kc_score_fast",
    "kc_score_naive",
    "kc_scores_all",
    "kces_pipeline",
    "kmeans_pseudo_labels",
    "load_gram",
    "load_graph",
    "load_manifest",
    "make_sbm_benchmark",
    "make_split",
    "min_eigenvalue",
    "prune_count",
    "random_attack",
    "random_graph",
    "read_record_tsv",
    "remove_edge",
    "resolve_eta",
    "revert_record",
    "save_gram",
    "score_distribution",
    "select_edges",
    "solve_spd",
    "spectral_predictor",
    "test_bound",
    "train_gd",
    "with_edges",
    "write_distribution_csv",
    "write_edge_tsv",
    "write_features_csv",
    "write_labels",
    "write_manifest",
    "write_trace_csv",
]
