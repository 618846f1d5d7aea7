"""High-dimensional neighbor affinities.

Per-point Gaussian similarities are row-normalized into conditional
probabilities; a binary search per point tunes the bandwidth so that the row
entropy matches the log of a target perplexity (the effective neighbor
count).  Conditional probabilities can then be symmetrized into a single
joint distribution over ordered pairs.
"""

import numpy as np

from .exceptions import DegenerateDataError
from ._validation import check_matrix

# Weights below this value are clipped before normalization so that no row of
# the affinity matrix is numerically zero and log terms stay finite.
PROB_FLOOR = 1e-12


def pairwise_sq_distances(X):
    """Full matrix of squared Euclidean distances with an exactly zero diagonal."""
    sq = np.einsum("ij,ij->i", X, X)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return d2


def _shifted_exponents(d2_rows, shift, betas, self_cols):
    """(shift - d2) * beta per row with the self entry forced to -inf.

    The shift (row-minimum squared distance) cancels under row normalization
    but keeps the largest weight at 1 even for tiny bandwidths; the -inf self
    entry turns into an exact 0 weight under exp.
    """
    e = (shift[:, None] - d2_rows) * betas[:, None]
    e[np.arange(e.shape[0]), self_cols] = -np.inf
    return e


def conditional_affinities(X, sigmas):
    """Row-normalized Gaussian conditional probabilities.

    Parameters
    ----------
    X : array of shape (n, d)
        Sample coordinates; must be finite.
    sigmas : array of shape (n,)
        Positive per-point Gaussian bandwidths.

    Returns
    -------
    array of shape (n, n) with zero diagonal where each row sums to 1.
    """
    X = check_matrix(X, min_rows=2)
    sigmas = np.asarray(sigmas, dtype=np.float64)
    if sigmas.shape != (X.shape[0],):
        raise ValueError(f"sigmas must have shape ({X.shape[0]},), got {sigmas.shape}")
    if not np.isfinite(sigmas).all() or (sigmas <= 0).any():
        raise ValueError("sigmas must be positive and finite")
    n = X.shape[0]
    d2 = pairwise_sq_distances(X)
    shift = np.where(np.eye(n, dtype=bool), np.inf, d2).min(axis=1)
    betas = 1.0 / (2.0 * sigmas**2)
    w = np.exp(_shifted_exponents(d2, shift, betas, np.arange(n)))
    np.maximum(w, PROB_FLOOR, out=w)
    np.fill_diagonal(w, 0.0)
    return w / w.sum(axis=1, keepdims=True)


def row_entropy(affinities, row):
    """Shannon entropy (natural log) of one row of a row-normalized matrix.

    Zero entries contribute nothing, matching the p*log(p) -> 0 limit.
    """
    p = np.asarray(affinities, dtype=np.float64)[row]
    nz = p > 0
    return float(-np.dot(p[nz], np.log(p[nz])))


def _entropies_for_betas(d2_rows, shift, betas, self_cols):
    """Row entropies of the Gaussian conditionals at the given precisions.

    Uses H = log Z + beta * E[d2 - shift] on the shifted weights, which is
    algebraically the entropy of the normalized row.
    """
    w = np.exp(_shifted_exponents(d2_rows, shift, betas, self_cols))
    z = w.sum(axis=1)
    mean_d2 = np.einsum("ij,ij->i", w, d2_rows) / z
    return np.log(z) + betas * (mean_d2 - shift)


def calibrate_bandwidths(X, perplexity, *, entropy_tolerance=1e-5,
                         max_bisection_steps=50):
    """Per-point bandwidths whose row entropies match log(perplexity).

    A bracketing search on sigma (double/halve until the target entropy is
    bracketed, then bisect) runs for every point simultaneously.  Row entropy
    is non-decreasing in sigma, which makes the bracketing sound.

    Parameters
    ----------
    X : array of shape (n, d)
    perplexity : float in (1, n)
        Target effective neighbor count.
    entropy_tolerance : float
        Convergence threshold on |entropy - log(perplexity)|.
    max_bisection_steps : int
        Search budget per point; the best sigma seen so far is returned for
        points that fail to converge.

    Returns
    -------
    sigmas : array of shape (n,)
    entropy_gap : array of shape (n,)
        |entropy - log(perplexity)| at the returned sigmas; entries above
        ``entropy_tolerance`` mark points that did not converge.
    """
    X = check_matrix(X, min_rows=2)
    n = X.shape[0]
    perplexity = float(perplexity)
    if not 1.0 < perplexity < n:
        raise ValueError(f"perplexity must lie in (1, {n}), got {perplexity}")
    if entropy_tolerance <= 0:
        raise ValueError("entropy_tolerance must be positive")
    if max_bisection_steps < 1:
        raise ValueError("max_bisection_steps must be at least 1")

    d2 = pairwise_sq_distances(X)
    mask = np.eye(n, dtype=bool)
    if d2[~mask].max() == 0.0:
        raise DegenerateDataError("all points are identical; bandwidths are undefined")
    off = np.where(mask, np.inf, d2)
    shift = off.min(axis=1)

    target = np.log(perplexity)
    sigma = np.ones(n)
    lo = np.zeros(n)
    hi = np.full(n, np.inf)
    best_sigma = sigma.copy()
    best_gap = np.full(n, np.inf)
    active = np.arange(n)

    for _ in range(max_bisection_steps):
        betas = 1.0 / (2.0 * sigma[active] ** 2)
        ent = _entropies_for_betas(d2[active], shift[active], betas, active)
        gap = np.abs(ent - target)

        better = gap < best_gap[active]
        idx = active[better]
        best_gap[idx] = gap[better]
        best_sigma[idx] = sigma[idx]

        unconverged = gap > entropy_tolerance
        active = active[unconverged]
        if active.size == 0:
            break
        ent = ent[unconverged]

        # Entropy too low -> widen the kernel; too high -> narrow it.
        low = ent < target
        lo[active[low]] = sigma[active[low]]
        hi[active[~low]] = sigma[active[~low]]
        sigma[active] = np.where(np.isinf(hi[active]),
                                 sigma[active] * 2.0,
                                 0.5 * (lo[active] + hi[active]))

    return best_sigma, best_gap


def symmetrize(conditional, n=None):
    """Joint probabilities p_ij = (p_{j|i} + p_{i|j}) / (2n).

    The result is exactly symmetric with zero diagonal; entries are floored
    at PROB_FLOOR and rescaled so the global sum is exactly 1.
    """
    p = np.asarray(conditional, dtype=np.float64)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise ValueError(f"conditional matrix must be square, got shape {p.shape}")
    if n is None:
        n = p.shape[0]
    joint = (p + p.T) / (2.0 * n)
    np.maximum(joint, PROB_FLOOR, out=joint)
    np.fill_diagonal(joint, 0.0)
    joint /= joint.sum()
    return joint
