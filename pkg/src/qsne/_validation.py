"""Input validation helpers used by the estimators and the functional API."""

import numpy as np

#: Canonical method names; "symmetric_sne" is accepted as an alias of "ssne".
METHODS = ("sne", "ssne", "tsne", "qsne")

KERNEL_FAMILIES = ("sne_conditional", "sne_symmetric", "qgaussian")


def check_matrix(X, name="X", min_rows=1, min_cols=1):
    """Coerce to a 2-D float64 array and require finite entries."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"{name} must be a 2-D array, got shape {X.shape}")
    n, d = X.shape
    if n < min_rows:
        raise ValueError(f"{name} needs at least {min_rows} rows, got {n}")
    if d < min_cols:
        raise ValueError(f"{name} needs at least {min_cols} columns, got {d}")
    if not np.isfinite(X).all():
        raise ValueError(f"{name} contains NaN or infinite entries")
    return X


def check_labels(labels, n):
    labels = np.asarray(labels)
    if labels.shape != (n,):
        raise ValueError(f"labels must have shape ({n},), got {labels.shape}")
    return labels.astype(np.int64)


def check_method(method):
    if method == "symmetric_sne":
        return "ssne"
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    return method


def check_embedding_q(q):
    """The embedding kernel is defined for q in [1, 3) only."""
    q = float(q)
    if not 1.0 <= q < 3.0:
        raise ValueError(f"q must lie in [1.0, 3.0) for the embedding kernel, got {q}")
    return q


def check_square_pair(p, r):
    p = np.asarray(p, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    if p.shape != r.shape or p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise ValueError(f"expected two square matrices of equal shape, got {p.shape} and {r.shape}")
    return p, r


def normalization_family(p, tol=1e-6):
    """Classify an affinity matrix as 'row' or 'global' normalized (None if neither)."""
    total = p.sum()
    if abs(total - 1.0) <= tol:
        return "global"
    if np.abs(p.sum(axis=1) - 1.0).max() <= tol:
        return "row"
    return None
