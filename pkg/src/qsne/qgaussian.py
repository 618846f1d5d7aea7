"""q-Gaussian density and low-dimensional affinity kernels.

The q-Gaussian family generalizes the Gaussian through a shape parameter q:
q -> 1 recovers the Gaussian, q = 1 + 2/(n+1) recovers the Student-t with n
degrees of freedom (so q = 2 is the Cauchy / t-SNE kernel), and larger q
gives heavier tails.  The same parametrization drives every low-dimensional
kernel used by the embedding methods.
"""

import math

import numpy as np

from .affinity import PROB_FLOOR, pairwise_sq_distances
from ._validation import check_matrix, check_embedding_q, KERNEL_FAMILIES


def _beta(a, b):
    # Log-gamma keeps Beta finite for the large first arguments near q = 1.
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


def q_from_dof(n):
    """Shape parameter q whose q-Gaussian equals the Student-t with n dof."""
    if n < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {n}")
    return 1.0 + 2.0 / (n + 1.0)


def z_q(q, sigma=1.0):
    """Normalization constant of the one-dimensional q-Gaussian density.

    Two branches: sqrt((3-q)/(q-1)) * Beta((3-q)/(2(q-1)), 1/2) * sigma for
    1 < q < 3 and sqrt((3-q)/(1-q)) * Beta((2-q)/(1-q), 1/2) * sigma for
    q < 1.  The q = 1 Gaussian limit, sqrt(2 pi) * sigma, is handled by
    ``qgaussian_pdf`` directly.
    """
    q = float(q)
    if q >= 3.0:
        raise ValueError(f"q must be below 3, got {q}")
    if q == 1.0:
        raise ValueError("q = 1 is the Gaussian limit; use qgaussian_pdf for it")
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if q > 1.0:
        return math.sqrt((3.0 - q) / (q - 1.0)) * _beta((3.0 - q) / (2.0 * (q - 1.0)), 0.5) * sigma
    return math.sqrt((3.0 - q) / (1.0 - q)) * _beta((2.0 - q) / (1.0 - q), 0.5) * sigma


def qgaussian_pdf(s, q, mu=0.0, sigma=1.0):
    """One-dimensional q-Gaussian density at ``s`` (scalar or array).

    For q < 1 the support is bounded; outside it the density is zero.  At
    q = 1 the analytic Gaussian limit is returned.
    """
    q = float(q)
    if q >= 3.0:
        raise ValueError(f"q must be below 3, got {q}")
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    s = np.asarray(s, dtype=np.float64)
    u = (s - mu) ** 2 / sigma**2
    if q == 1.0:
        out = np.exp(-0.5 * u) / (sigma * math.sqrt(2.0 * math.pi))
    else:
        base = 1.0 + (q - 1.0) / (3.0 - q) * u
        if q > 1.0:
            out = base ** (-1.0 / (q - 1.0)) / z_q(q, sigma)
        else:
            # Positive exponent: clipping negative bases to 0 zeroes the
            # density exactly where the support inequality fails.
            out = np.maximum(base, 0.0) ** (1.0 / (1.0 - q)) / z_q(q, sigma)
    if np.isscalar(s) or out.ndim == 0:
        return float(out)
    return out


def _qgauss_log_weights(d2, q):
    """log of the unnormalized embedding weights (1 + (q-1)/(3-q) d2)^(-1/(q-1)).

    At q = 1 the analytic limit exp(-d2/2) applies, i.e. log weight -d2/2.
    """
    if q == 1.0:
        return -0.5 * d2
    c = (q - 1.0) / (3.0 - q)
    return np.log1p(c * d2) * (-1.0 / (q - 1.0))


def low_dim_affinities(embedding, kernel_family="qgaussian", q=2.0):
    """Pairwise affinities of the embedded points under the chosen kernel.

    Parameters
    ----------
    embedding : array of shape (n, d)
    kernel_family : one of "sne_conditional", "sne_symmetric", "qgaussian"
        sne_conditional row-normalizes exp(-d2) per point; sne_symmetric
        normalizes exp(-d2) over all ordered pairs; qgaussian normalizes the
        q-Gaussian weight over all ordered pairs.
    q : float in [1, 3)
        Only used by the qgaussian family; q = 2 gives the t-SNE kernel and
        q = 1 the Gaussian-limit kernel exp(-d2/2).

    Returns
    -------
    array of shape (n, n), zero diagonal, normalized per the family.
    """
    Y = check_matrix(embedding, name="embedding", min_rows=2)
    if kernel_family not in KERNEL_FAMILIES:
        raise ValueError(f"unknown kernel family {kernel_family!r}; expected one of {KERNEL_FAMILIES}")
    d2 = pairwise_sq_distances(Y)
    if kernel_family == "qgaussian":
        q = check_embedding_q(q)
        w = np.exp(_qgauss_log_weights(d2, q))
    else:
        w = np.exp(-d2)
    np.fill_diagonal(w, 0.0)
    np.maximum(w, PROB_FLOOR, out=w)
    np.fill_diagonal(w, 0.0)
    if kernel_family == "sne_conditional":
        return w / w.sum(axis=1, keepdims=True)
    return w / w.sum()
