"""Embedding quality metrics: leave-one-out k-NN accuracy and co-ranking Q_local.

Both metrics depend only on neighbor ranks, so they are invariant under rigid
rotations and uniform scaling of the embedding.  All distance ties are broken
toward the smaller point index to keep results deterministic.
"""

import numpy as np

from .affinity import pairwise_sq_distances
from ._validation import check_matrix, check_labels


def _neighbor_order(X):
    """Row i lists all other points sorted by distance to i (ties: smaller index)."""
    d2 = pairwise_sq_distances(X)
    np.fill_diagonal(d2, np.inf)
    return np.argsort(d2, axis=1, kind="stable")[:, :-1], d2


def knn_accuracy(embedding, labels, k=10):
    """Leave-one-out accuracy of a k-nearest-neighbor majority vote.

    Vote ties are resolved in favor of the class of the nearest neighbor
    among the tied classes.
    """
    Y = check_matrix(embedding, name="embedding", min_rows=2)
    n = Y.shape[0]
    labels = check_labels(labels, n)
    # Compact nonnegative codes so arbitrary class ids survive bincount.
    labels = np.unique(labels, return_inverse=True)[1]
    k = int(k)
    if not 1 <= k < n:
        raise ValueError(f"k must lie in [1, {n - 1}], got {k}")
    order, _ = _neighbor_order(Y)
    correct = 0
    for i in range(n):
        votes = labels[order[i, :k]]
        counts = np.bincount(votes)
        best = counts.max()
        for lab in votes:  # first tied class in distance order wins
            if counts[lab] == best:
                correct += lab == labels[i]
                break
    return correct / n


def coranking_matrix(high, low):
    """Joint histogram of neighbor ranks in the original and embedded spaces.

    Entry [k-1, l-1] counts ordered pairs (i, j) where j is i's k-th nearest
    neighbor in the high-dimensional space and its l-th nearest in the
    embedding.  Every row and column sums to n.
    """
    X = check_matrix(high, name="high", min_rows=3)
    Y = check_matrix(low, name="low", min_rows=3)
    n = X.shape[0]
    if Y.shape[0] != n:
        raise ValueError(f"high has {n} rows but low has {Y.shape[0]}")
    ranks = []
    for data in (X, Y):
        order, _ = _neighbor_order(data)
        r = np.empty((n, n), dtype=np.int64)
        np.put_along_axis(r, order, np.arange(1, n)[None, :], axis=1)
        np.fill_diagonal(r, 0)
        ranks.append(r)
    rh, rl = ranks
    off = ~np.eye(n, dtype=bool)
    flat = (rh[off] - 1) * (n - 1) + (rl[off] - 1)
    counts = np.bincount(flat, minlength=(n - 1) * (n - 1))
    return counts.reshape(n - 1, n - 1)


def q_local(coranking):
    """Local quality score derived from a co-ranking matrix.

    Q_NX(K) is the fraction of ordered pairs whose ranks stay within K on
    both sides.  The local range ends at K_max, the K maximizing
    Q_NX(K) - K/(n-1), and Q_local averages Q_NX over K = 1..K_max.

    Returns
    -------
    (q_local, q_nx_curve, k_max) where the curve covers K = 1..n-2.
    """
    counts = np.asarray(coranking)
    if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
        raise ValueError(f"co-ranking matrix must be square, got shape {counts.shape}")
    m = counts.shape[0]
    n = m + 1
    block = counts.cumsum(axis=0).cumsum(axis=1)
    ks = np.arange(1, n - 1)
    curve = np.diagonal(block)[: n - 2] / (ks * n)
    k_max = int(np.argmax(curve - ks / (n - 1))) + 1
    score = float(curve[:k_max].mean())
    return score, curve, k_max
