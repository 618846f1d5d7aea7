"""Synthetic datasets for experiments and tests."""

import numpy as np


def make_swissroll(n=1500, noise=0.0, seed=0):
    """Swiss roll: (t cos t, h, t sin t) with t ~ U[1.5pi, 4.5pi], h ~ U[0, 21].

    Labels are the quartile of t within its sampling interval, a proxy for
    position along the rolled-up sheet.  Optional isotropic Gaussian noise of
    scale ``noise`` is added to the coordinates.

    Returns (points, labels) with shapes (n, 3) and (n,).
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if noise < 0:
        raise ValueError(f"noise must be nonnegative, got {noise}")
    rng = np.random.default_rng(seed)
    t_lo, t_hi = 1.5 * np.pi, 4.5 * np.pi
    t = rng.uniform(t_lo, t_hi, size=n)
    h = rng.uniform(0.0, 21.0, size=n)
    points = np.column_stack((t * np.cos(t), h, t * np.sin(t)))
    # Scale-by-noise keeps the random stream identical across noise values.
    points += noise * rng.normal(size=(n, 3))
    edges = t_lo + (t_hi - t_lo) * np.array([0.25, 0.5, 0.75])
    labels = np.digitize(t, edges)
    return points, labels


def make_gaussian_mixture(n_per_class=100, n_classes=5, dim=10, separation=10.0, seed=0):
    """Isotropic unit-variance Gaussian clusters with well-separated means.

    Class means are drawn in random directions and rescaled so every pair of
    means is at least ``separation`` apart.

    Returns (points, labels) with shapes (n_per_class * n_classes, dim).
    """
    if n_per_class < 1 or n_classes < 1 or dim < 1:
        raise ValueError("n_per_class, n_classes and dim must be positive")
    if separation < 0:
        raise ValueError(f"separation must be nonnegative, got {separation}")
    rng = np.random.default_rng(seed)
    means = rng.normal(size=(n_classes, dim))
    if n_classes > 1:
        diffs = means[:, None, :] - means[None, :, :]
        dists = np.sqrt((diffs**2).sum(-1))
        min_dist = dists[~np.eye(n_classes, dtype=bool)].min()
        while min_dist == 0.0:  # essentially impossible, but keeps the contract
            means = rng.normal(size=(n_classes, dim))
            diffs = means[:, None, :] - means[None, :, :]
            dists = np.sqrt((diffs**2).sum(-1))
            min_dist = dists[~np.eye(n_classes, dtype=bool)].min()
        if separation > 0:
            means *= separation / min_dist
    labels = np.repeat(np.arange(n_classes), n_per_class)
    points = means[labels] + rng.normal(size=(labels.size, dim))
    return points, labels
