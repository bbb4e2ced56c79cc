"""Independent reference implementations used as test oracles.

Everything here recomputes results from first principles with dense
numpy: explicit adjacency matrices, per-entry kernel loops, explicit
matrix inverses.  None of it shares code with the library, so agreement
is evidence of correctness rather than of shared bugs.
"""

import numpy as np

TWO_PI = 2.0 * np.pi


def oracle_aggregate(features, edges):
    """Symmetric-normalized neighborhood average with self-loops.

    Returns (unit_rows, pre_normalization_norms).
    """
    x = np.asarray(features, dtype=np.float64)
    n = x.shape[0]
    a = np.zeros((n, n))
    for u, v in edges:
        a[u, v] = 1.0
        a[v, u] = 1.0
    a = a + np.eye(n)
    d = a.sum(axis=1)
    scale = np.diag(1.0 / np.sqrt(d))
    rows = scale @ a @ scale @ x
    norms = np.sqrt((rows * rows).sum(axis=1))
    return rows / norms[:, None], norms


def oracle_gram(unit_rows):
    """Entrywise arccos kernel of exact-unit rows; symmetric by mirroring."""
    rows = np.asarray(unit_rows, dtype=np.float64)
    n = rows.shape[0]
    h = np.empty((n, n))
    for i in range(n):
        h[i, i] = 0.5
        for j in range(i + 1, n):
            d = float(rows[i] @ rows[j])
            d = max(-1.0, min(1.0, d))
            h[i, j] = d * (np.pi - np.arccos(d)) / TWO_PI
            h[j, i] = h[i, j]
    return h


def oracle_gkc(h, label_columns, ridge=0.0):
    """Complexity via an explicit dense inverse, summed over columns."""
    h = np.asarray(h, dtype=np.float64)
    n = h.shape[0]
    hinv = np.linalg.inv(h + ridge * np.eye(n))
    total = 0.0
    for col in np.asarray(label_columns, dtype=np.float64).T:
        total += 2.0 * float(col @ hinv @ col) / n
    return total


def oracle_gkc_from_graph(features, edges, label_columns, ridge=0.0):
    rows, _ = oracle_aggregate(features, edges)
    return oracle_gkc(oracle_gram(rows), label_columns, ridge=ridge)


def oracle_gkc_pinv(h, label_columns, cutoff=1e-10):
    """Pseudo-inverse limit of the complexity quadratic form.

    Structurally duplicated rows make the kernel matrix singular; when
    every label column is orthogonal to the null space the complexity
    still has a finite limit, computed here by truncated eigendecomposition.
    """
    h = np.asarray(h, dtype=np.float64)
    n = h.shape[0]
    eigvals, eigvecs = np.linalg.eigh(h)
    keep = eigvals > cutoff * eigvals.max()
    total = 0.0
    for col in np.asarray(label_columns, dtype=np.float64).T:
        proj = eigvecs.T @ col
        assert np.abs(proj[~keep]).max(initial=0.0) < 1e-8, (
            "labels overlap the kernel null space; complexity diverges"
        )
        total += 2.0 * float((proj[keep] ** 2 / eigvals[keep]).sum()) / n
    return total


def oracle_kc(features, edges, label_columns, u, v):
    """Edge score as the absolute complexity change of removing (u, v).

    Falls back to the pseudo-inverse limit when the removal makes the
    kernel matrix singular (structurally duplicated neighborhoods).
    """
    edge = (min(u, v), max(u, v))
    canon = [(min(a, b), max(a, b)) for a, b in edges]
    assert edge in canon, f"oracle asked about missing edge {edge}"
    kept = [e for e in canon if e != edge]
    base = oracle_gkc_from_graph(features, canon, label_columns)
    rows, _ = oracle_aggregate(features, kept)
    h = oracle_gram(rows)
    try:
        removed = oracle_gkc(h, label_columns)
    except np.linalg.LinAlgError:
        removed = oracle_gkc_pinv(h, label_columns)
    return abs(base - removed)


def oracle_fd_loss_gradient(w, a, x, y, m, idx, h=1e-6):
    """Central-difference dL/dw at one weight coordinate.

    L is the half squared error of the width-m ReLU network; the probe
    recomputes the loss from scratch on both sides of the step.
    """

    def loss(wm):
        z = np.maximum(x @ wm, 0.0)
        f = (z @ a) / np.sqrt(m)
        return 0.5 * float(((f - y) ** 2).sum())

    wp = w.copy()
    wp[idx] += h
    wn = w.copy()
    wn[idx] -= h
    return (loss(wp) - loss(wn)) / (2.0 * h)


def oracle_kmeans_best_inertia(points, k=2):
    """Global minimum inertia over all assignments (tiny inputs only)."""
    pts = np.asarray(points, dtype=np.float64)
    n = pts.shape[0]
    assert k == 2 and n <= 12, "exhaustive search is only for tiny cases"
    best = np.inf
    for mask in range(1, 2**n - 1):
        sel = np.array([(mask >> i) & 1 for i in range(n)], dtype=bool)
        inertia = 0.0
        for side in (sel, ~sel):
            center = pts[side].mean(axis=0)
            inertia += ((pts[side] - center) ** 2).sum()
        best = min(best, inertia)
    return best


def oracle_one_hot(assignments, k):
    cols = np.zeros((len(assignments), k))
    for i, c in enumerate(assignments):
        cols[i, c] = 1.0
    return cols


def random_label_columns(rng, n, k=2):
    """Random one-hot labels guaranteed to use every class."""
    while True:
        assign = rng.integers(0, k, size=n)
        if np.unique(assign).size == k:
            return oracle_one_hot(assign, k)
