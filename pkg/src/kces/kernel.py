"""Infinite-width ReLU kernel Gram matrix and the GKC functional.

The Gram matrix over unit-norm aggregated rows x_i is

    H[i, j] = d * (pi - arccos(d)) / (2 pi),   d = <x_i, x_j>,

so H[i, i] = 0.5 exactly and |H[i, j]| <= 0.5.  GKC is the label-norm
functional 2 y^T H^{-1} y / N, summed over label columns, evaluated
through a cached Cholesky factorization; an explicit inverse is never
formed.  When the factorization fails or its smallest pivot marks the
matrix as numerically rank-deficient, a small ridge proportional to
trace(H)/N is added once and flagged.
"""

from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import IllConditionedError, InputError, KcesWarning, NumericError
from .graph import AggregatedFeatures, _readonly
from .pseudolabel import LabelMatrix

RIDGE_SCALE = 1e-8
SOLVE_RESIDUAL_TOL = 1e-8
#: A Cholesky pivot below sqrt(N * eps * max_ii h) marks the matrix as
#: numerically rank-deficient even when the factorization routine returns.
PIVOT_RTOL = np.finfo(np.float64).eps
#: Refinement passes allowed before the residual gate gives up.
MAX_REFINEMENTS = 2

GRAM_MAGIC = b"GKGM"
GRAM_HEADER = struct.Struct("<4sII4x")  # magic, u32 N, u32 reserved, padding


def arccos_kernel(dots: np.ndarray) -> np.ndarray:
    """Apply the kernel map entrywise to a matrix of inner products."""
    d = np.clip(dots, -1.0, 1.0)
    return d * (np.pi - np.arccos(d)) / (2.0 * np.pi)


class GramMatrix:
    """Kernel Gram matrix with its Cholesky factor and ridge bookkeeping.

    ``h`` is the raw (pre-ridge) matrix; ``ridge`` is 0.0 unless the
    factorization needed regularization; ``chol_lower`` factors
    h + ridge * I.  ``lambda_min`` is the smallest eigenvalue of the raw
    matrix, computed on first access.
    """

    __slots__ = ("h", "ridge", "chol_lower", "_lambda_min")

    def __init__(self, h: np.ndarray, ridge: float, chol_lower: np.ndarray):
        self.h = _readonly(h)
        self.ridge = float(ridge)
        self.chol_lower = _readonly(chol_lower)
        self._lambda_min = None

    @property
    def n(self) -> int:
        return self.h.shape[0]

    @property
    def lambda_min(self) -> float:
        if self._lambda_min is None:
            self._lambda_min = min_eigenvalue(self)
        return self._lambda_min

    def solve_factored(self, rhs: np.ndarray) -> np.ndarray:
        """Raw triangular solve against the cached factor (no residual check)."""
        return scipy.linalg.cho_solve((self.chol_lower, True), rhs)


def _factor_with_ridge(h: np.ndarray):
    # The factorization routine can return on an exactly singular matrix
    # with a tiny lucky pivot whose factor is useless for solves, so a
    # pivot-quality gate decides rank deficiency deterministically.
    pivot_floor = np.sqrt(
        h.shape[0] * PIVOT_RTOL * max(float(np.max(np.diag(h))), 0.0)
    )
    try:
        chol = scipy.linalg.cholesky(h, lower=True)
        if float(np.min(np.diag(chol))) > pivot_floor:
            return 0.0, chol
    except scipy.linalg.LinAlgError:
        pass
    ridge = RIDGE_SCALE * float(np.trace(h)) / h.shape[0]
    warnings.warn(
        f"Gram matrix not positive definite; adding ridge {ridge:.3e}",
        KcesWarning,
        stacklevel=3,
    )
    try:
        hr = h + ridge * np.eye(h.shape[0])
        return ridge, scipy.linalg.cholesky(hr, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise NumericError(
            "Gram matrix is not factorizable even with ridge"
        ) from exc


def gram_matrix(xt: AggregatedFeatures) -> GramMatrix:
    """Build the Gram matrix of the aggregated rows and factor it.

    Inner products are symmetrized and the diagonal pinned to exact
    unit dot products, so H[i, i] is 0.5 to the last bit.
    """
    rows = xt.matrix
    dots = rows @ rows.T
    dots = (dots + dots.T) / 2.0
    np.fill_diagonal(dots, 1.0)
    h = arccos_kernel(dots)
    ridge, chol = _factor_with_ridge(h)
    return GramMatrix(h, ridge, chol)


def gram_from_matrix(h: np.ndarray) -> GramMatrix:
    """Re-wrap a stored Gram matrix (refactorizes; ridge re-decided)."""
    h = np.asarray(h, dtype=np.float64)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise InputError("Gram matrix must be square")
    ridge, chol = _factor_with_ridge(h)
    return GramMatrix(h, ridge, chol)


def min_eigenvalue(gm: GramMatrix) -> float:
    """Smallest eigenvalue of the raw (pre-ridge) Gram matrix."""
    try:
        return float(np.linalg.eigvalsh(gm.h)[0])
    except np.linalg.LinAlgError as exc:
        raise NumericError("eigenvalue computation failed") from exc


def solve_spd(gm: GramMatrix, rhs: np.ndarray) -> np.ndarray:
    """Solve (h + ridge I) z = rhs via the cached factor, with residual check.

    A marginal first solve gets up to two rounds of iterative refinement;
    the relative residual must come out below 1e-8 or the system is
    reported ill-conditioned.
    """
    rhs = np.asarray(rhs, dtype=np.float64)
    rhs_norm = float(np.linalg.norm(rhs))
    z = gm.solve_factored(rhs)
    residual = rhs - (gm.h @ z + gm.ridge * z)
    res_norm = float(np.linalg.norm(residual))
    refinements = 0
    while res_norm > SOLVE_RESIDUAL_TOL * rhs_norm and refinements < MAX_REFINEMENTS:
        z = z + gm.solve_factored(residual)
        residual = rhs - (gm.h @ z + gm.ridge * z)
        res_norm = float(np.linalg.norm(residual))
        refinements += 1
    if res_norm > SOLVE_RESIDUAL_TOL * rhs_norm:
        raise IllConditionedError(
            f"solve residual {res_norm:.3e} exceeds tolerance "
            f"{SOLVE_RESIDUAL_TOL:.1e} * {rhs_norm:.3e}",
            residual=res_norm,
        )
    return z


@dataclass(frozen=True)
class GkcValue:
    """GKC total, its per-column contributions, and the ridge flag."""

    value: float
    per_column: tuple
    ridge_used: bool


def gkc(gm: GramMatrix, labels: LabelMatrix) -> GkcValue:
    """Label-norm complexity 2 y^T H^{-1} y / N summed over label columns."""
    if labels.columns.shape[0] != gm.n:
        raise InputError(
            f"labels have {labels.columns.shape[0]} rows, Gram matrix has {gm.n}"
        )
    z = solve_spd(gm, labels.columns)
    per_column = tuple(
        float(2.0 * (labels.columns[:, c] @ z[:, c]) / gm.n)
        for c in range(labels.columns.shape[1])
    )
    return GkcValue(
        value=float(sum(per_column)),
        per_column=per_column,
        ridge_used=gm.ridge > 0.0,
    )


def save_gram(gm: GramMatrix, path) -> None:
    """Dump the raw Gram matrix: 16-byte header, then row-major float64."""
    with open(path, "wb") as fh:
        fh.write(GRAM_HEADER.pack(GRAM_MAGIC, gm.n, 0))
        fh.write(np.ascontiguousarray(gm.h, dtype="<f8").tobytes())


def load_gram(path) -> GramMatrix:
    """Load a dumped Gram matrix and refactorize it."""
    with open(path, "rb") as fh:
        header = fh.read(GRAM_HEADER.size)
        if len(header) != GRAM_HEADER.size:
            raise InputError(f"{path}: truncated header")
        magic, n, _reserved = GRAM_HEADER.unpack(header)
        if magic != GRAM_MAGIC:
            raise InputError(f"{path}: bad magic {magic!r}")
        payload = fh.read()
    expected = 8 * n * n
    if len(payload) != expected:
        raise InputError(
            f"{path}: expected {expected} payload bytes, found {len(payload)}"
        )
    h = np.frombuffer(payload, dtype="<f8").reshape(n, n)
    return gram_from_matrix(h)
