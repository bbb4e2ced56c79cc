"""Two-layer ReLU network on aggregated features, trained in the kernel regime.

The model is f_i = (1/sqrt(m)) * sum_r a_r * relu(w_r . x_i) with random
signs a fixed at init and first-layer weights w trained by full-batch
gradient descent on the squared loss.  At large width the residual norm
follows the spectrum of the kernel Gram matrix, which the spectral
predictor evaluates in closed form; the generalization bounds combine
the complexity functional with a confidence term.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    BoundedLabelError,
    ConfigError,
    DegenerateSplitError,
    DivergenceError,
    KcesWarning,
)
from .graph import AggregatedFeatures, Graph, aggregate_features, format_float
from .kernel import GramMatrix, GkcValue, arccos_kernel


@dataclass(frozen=True)
class TrainConfig:
    """Width m, step size eta (None = 1/lambda_max at fit time), init scale
    kappa, step count, and seed."""

    m: int
    steps: int
    eta: float | None = None
    kappa: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.m < 1:
            raise ConfigError(f"width must be positive, got {self.m}")
        if self.steps < 0:
            raise ConfigError(f"steps must be non-negative, got {self.steps}")
        if self.eta is not None and not self.eta > 0.0:
            raise ConfigError(f"eta must be positive, got {self.eta}")
        if not 0.0 < self.kappa <= 1.0:
            raise ConfigError(f"kappa must be in (0, 1], got {self.kappa}")


@dataclass
class ModelState:
    """First-layer weights (F, m), fixed signs (m,), and the config."""

    w: np.ndarray
    a: np.ndarray
    config: TrainConfig


@dataclass
class TrainTrace:
    """Residual norms and losses at steps 0..steps, plus the final state."""

    residual_norms: np.ndarray
    losses: np.ndarray
    final_state: ModelState


def _rows(xt) -> np.ndarray:
    return xt.matrix if isinstance(xt, AggregatedFeatures) else np.asarray(xt)


def init_model(cfg: TrainConfig, n_features: int) -> ModelState:
    """Gaussian first layer with std kappa; signs a_r uniform in {-1, +1}."""
    rng = np.random.default_rng([int(cfg.seed) & 0xFFFFFFFFFFFFFFFF, 0x91])
    w = cfg.kappa * rng.standard_normal((n_features, cfg.m))
    a = rng.choice(np.array([-1.0, 1.0]), size=cfg.m)
    return ModelState(w=w, a=a, config=cfg)


def forward(state: ModelState, xt) -> np.ndarray:
    """Network outputs (1/sqrt(m)) * relu(X W) a for each row of X."""
    x = _rows(xt)
    z = np.maximum(x @ state.w, 0.0)
    return (z @ state.a) / math.sqrt(state.config.m)


def _gradient(w, a, x, y, m):
    z = x @ w
    f = (np.maximum(z, 0.0) @ a) / math.sqrt(m)
    residual = f - y
    active = (z > 0.0).astype(np.float64)
    grad = (x.T @ (active * residual[:, None])) * (a[None, :] / math.sqrt(m))
    return f, grad


def train_gd(state: ModelState, xt, y, cfg: TrainConfig) -> TrainTrace:
    """Full-batch gradient descent on the squared loss L = 0.5 ||y - f||^2.

    Only the first layer moves; the output signs stay fixed.  Labels must
    be bounded by 1 in absolute value.  The trace records ||y - f|| and
    the loss at every step including step 0; a non-finite loss aborts
    with the offending step number.  The ReLU subgradient at exactly 0 is
    taken as 0 (strict positivity test), which removes the measure-zero
    ambiguity of the kink.
    """
    x = _rows(xt)
    y = np.asarray(y, dtype=np.float64)
    if (np.abs(y) > 1.0 + 1e-12).any():
        raise BoundedLabelError("training labels must lie in [-1, 1]")
    if state.w.shape != (x.shape[1], cfg.m):
        raise ConfigError(
            f"model shape {state.w.shape} does not match features x width "
            f"({x.shape[1]}, {cfg.m})"
        )
    eta = resolve_eta(cfg, x)
    w = state.w.copy()
    residual_norms = np.empty(cfg.steps + 1)
    losses = np.empty(cfg.steps + 1)
    for step in range(cfg.steps + 1):
        f, grad = _gradient(w, state.a, x, y, cfg.m)
        r = float(np.linalg.norm(y - f))
        loss = 0.5 * r * r
        if not np.isfinite(loss):
            raise DivergenceError(
                f"training loss became non-finite at step {step}", step=step
            )
        residual_norms[step] = r
        losses[step] = loss
        if step < cfg.steps:
            w -= eta * grad
    return TrainTrace(
        residual_norms=residual_norms,
        losses=losses,
        final_state=ModelState(w=w, a=state.a.copy(), config=cfg),
    )


@dataclass(frozen=True)
class SpectralPrediction:
    """Eigenvalues (ascending), squared label projections, and step size."""

    eigenvalues: np.ndarray
    projections: np.ndarray
    eta: float

    def predicted_norm(self, t):
        """sqrt(sum_i (1 - eta * lambda_i)^{2t} (v_i . y)^2) for integer t."""
        decay_sq = (1.0 - self.eta * self.eigenvalues) ** 2
        t_arr = np.atleast_1d(np.asarray(t, dtype=np.int64))
        powers = decay_sq[None, :] ** t_arr[:, None]
        out = np.sqrt(powers @ self.projections)
        return float(out[0]) if np.isscalar(t) or np.ndim(t) == 0 else out


def spectral_predictor(gm: GramMatrix, y, eta: float) -> SpectralPrediction:
    """Closed-form residual-norm forecast from the Gram spectrum.

    Eigendecomposes the raw (pre-ridge) matrix; warns when eta exceeds
    the stable range eta * lambda_max < 2.
    """
    y = np.asarray(y, dtype=np.float64)
    lam, vecs = np.linalg.eigh(gm.h)
    if eta * lam[-1] >= 2.0:
        warnings.warn(
            f"eta * lambda_max = {eta * lam[-1]:.3f} >= 2: divergent modes",
            KcesWarning,
            stacklevel=2,
        )
    return SpectralPrediction(
        eigenvalues=lam, projections=(vecs.T @ y) ** 2, eta=eta
    )


def write_trace_csv(trace: TrainTrace, path, prediction=None) -> None:
    """CSV 'step,residual_norm,loss,predicted_norm' for theory-vs-run plots."""
    steps = np.arange(trace.residual_norms.shape[0])
    predicted = (
        prediction.predicted_norm(steps)
        if prediction is not None
        else np.full(steps.shape[0], float("nan"))
    )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("step,residual_norm,loss,predicted_norm\n")
        for t in steps:
            fh.write(
                f"{t},{format_float(trace.residual_norms[t])},"
                f"{format_float(trace.losses[t])},"
                f"{format_float(predicted[t])}\n"
            )


# -- bounds ---------------------------------------------------------------


def test_bound(gkc_value, n: int, lambda0: float, delta: float, constant: float = 1.0):
    """Generalization bound sqrt(GKC) + C * sqrt(log(n / (lambda0 delta)) / n)."""
    value = gkc_value.value if isinstance(gkc_value, GkcValue) else float(gkc_value)
    if value < 0.0:
        raise ConfigError(f"complexity must be non-negative, got {value}")
    if n < 1:
        raise ConfigError(f"n must be positive, got {n}")
    if not lambda0 > 0.0:
        raise ConfigError(f"lambda0 must be positive, got {lambda0}")
    if not 0.0 < delta < 1.0:
        raise ConfigError(f"delta must be in (0, 1), got {delta}")
    log_arg = n / (lambda0 * delta)
    if log_arg < 1.0:
        raise ConfigError("confidence term undefined: n < lambda0 * delta")
    return math.sqrt(value) + constant * math.sqrt(math.log(log_arg) / n)


def edge_bound(
    base_gkc, kc_score: float, n: int, lambda0: float, delta: float,
    constant: float = 1.0,
):
    """Edge-removal variant: adds sqrt(kc) slack to the base bound."""
    if kc_score < 0.0:
        raise ConfigError(f"kc score must be non-negative, got {kc_score}")
    return test_bound(base_gkc, n, lambda0, delta, constant) + math.sqrt(kc_score)


# -- classifier evaluation ------------------------------------------------


@dataclass(frozen=True)
class Split:
    """Boolean node masks; disjoint, covering all nodes."""

    train: np.ndarray
    val: np.ndarray
    test: np.ndarray


def make_split(
    n: int, seed: int, train_frac: float = 0.1, val_frac: float = 0.1
) -> Split:
    """Seeded permutation split (default 10/10/80)."""
    if not 0.0 < train_frac + val_frac < 1.0:
        raise ConfigError("split fractions must leave room for a test set")
    rng = np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, 0x5917])
    perm = rng.permutation(n)
    n_train = int(round(train_frac * n))
    n_val = int(round(val_frac * n))
    train = np.zeros(n, dtype=bool)
    val = np.zeros(n, dtype=bool)
    test = np.zeros(n, dtype=bool)
    train[perm[:n_train]] = True
    val[perm[n_train : n_train + n_val]] = True
    test[perm[n_train + n_val :]] = True
    return Split(train=train, val=val, test=test)


@dataclass(frozen=True)
class AccuracyReport:
    """Train/val/test accuracy of the one-vs-rest classifier."""

    train_accuracy: float
    val_accuracy: float
    test_accuracy: float
    eta: float
    n_classes: int

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("split,accuracy\n")
            fh.write(f"train,{format_float(self.train_accuracy)}\n")
            fh.write(f"val,{format_float(self.val_accuracy)}\n")
            fh.write(f"test,{format_float(self.test_accuracy)}\n")


def resolve_eta(cfg: TrainConfig, rows: np.ndarray) -> float:
    """cfg.eta, or 1/lambda_max of the kernel over the given rows."""
    if cfg.eta is not None:
        return cfg.eta
    dots = rows @ rows.T
    dots = (dots + dots.T) / 2.0
    np.fill_diagonal(dots, 1.0)
    lam_max = float(np.linalg.eigvalsh(arccos_kernel(dots))[-1])
    return 1.0 / lam_max


def evaluate_classifier(
    g: Graph, labels, split: Split, cfg: TrainConfig, trace_sink=None
) -> AccuracyReport:
    """Train one scalar model per class on +1/-1 targets; argmax to predict.

    Aggregation sees the whole graph (transductive); gradient descent
    only sees training rows.  Per-class seeds derive from (cfg.seed,
    class index) so the report is reproducible.  ``trace_sink``, if
    given, receives (class index, TrainTrace) per class.
    """
    lab = np.asarray(labels, dtype=np.int64)
    if lab.shape != (g.n_nodes,):
        raise ConfigError(f"labels must have length {g.n_nodes}")
    classes = np.unique(lab)
    missing = [c for c in classes.tolist() if not (split.train & (lab == c)).any()]
    if missing:
        raise DegenerateSplitError(
            f"classes {missing} have no training nodes"
        )
    xt = aggregate_features(g)
    x_train = xt.matrix[split.train]
    eta = resolve_eta(cfg, x_train)

    scores = np.empty((g.n_nodes, classes.shape[0]))
    for idx, c in enumerate(classes.tolist()):
        targets = np.where(lab == c, 1.0, -1.0)
        derived = int(
            np.random.SeedSequence(
                [int(cfg.seed) & 0xFFFFFFFFFFFFFFFF, idx]
            ).generate_state(1)[0]
        )
        cls_cfg = replace(cfg, seed=derived, eta=eta)
        state = init_model(cls_cfg, g.n_features)
        trace = train_gd(state, x_train, targets[split.train], cls_cfg)
        if trace_sink is not None:
            trace_sink(idx, trace)
        scores[:, idx] = forward(trace.final_state, xt)

    pred = classes[np.argmax(scores, axis=1)]

    def acc(mask):
        return float((pred[mask] == lab[mask]).mean()) if mask.any() else float("nan")

    return AccuracyReport(
        train_accuracy=acc(split.train),
        val_accuracy=acc(split.val),
        test_accuracy=acc(split.test),
        eta=eta,
        n_classes=int(classes.shape[0]),
    )
