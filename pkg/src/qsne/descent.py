"""Momentum gradient descent on the KL divergence between affinities.

The four embedding methods share one loop: calibrate high-dimensional
affinities, optionally symmetrize them, exaggerate them for an initial phase,
then iterate kernel evaluation / gradient / momentum step.  A workspace of
preallocated buffers keeps the per-iteration cost at a handful of vectorized
passes over the n-by-n matrices.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .affinity import (PROB_FLOOR, calibrate_bandwidths, conditional_affinities,
                       symmetrize)
from .exceptions import DivergenceError
from ._validation import (check_matrix, check_method, check_embedding_q,
                          check_square_pair, normalization_family)

_LOG_FLOOR = float(np.log(PROB_FLOOR))


def kl_divergence(p, r):
    """Kullback-Leibler divergence sum_ij p_ij log(p_ij / r_ij).

    Zero entries of p contribute nothing.  Both matrices must share shape and
    normalization family (row-normalized or globally normalized).
    """
    p, r = check_square_pair(p, r)
    fam_p = normalization_family(p)
    fam_r = normalization_family(r)
    if fam_p is None or fam_p != fam_r:
        raise ValueError(
            f"p and r must share a normalization family, got {fam_p!r} and {fam_r!r}")
    mask = p > 0
    return float(np.sum(p[mask] * np.log(p[mask] / r[mask])))


def _resolve_q(method, q):
    """Effective q of the low-dimensional kernel (None for the exp kernels)."""
    if method == "tsne":
        return 2.0
    if method == "qsne":
        return check_embedding_q(q)
    return None


def _method_constants(method, q):
    """(c, factor) in the shared gradient form factor * (p-r)(y_i-y_j) / (1+c*d2)."""
    if method in ("sne", "ssne"):
        return 0.0, 4.0
    q = _resolve_q(method, q)
    return (q - 1.0) / (3.0 - q), 4.0 / (3.0 - q)


def gradient(p, r, embedding, method="qsne", q=2.0):
    """Analytic KL gradient with respect to the embedded coordinates.

    Dispatch:
      sne   2 * sum_j (p_{j|i}-r_{j|i} + p_{i|j}-r_{i|j}) (y_i-y_j)
      ssne  4 * sum_j (p_ij-r_ij) (y_i-y_j)
      tsne  4 * sum_j (p_ij-r_ij) (y_i-y_j) (1+d2)^-1
      qsne  4/(3-q) * sum_j (p_ij-r_ij) (y_i-y_j) (1+(q-1)/(3-q) d2)^-1
    """
    p, r = check_square_pair(p, r)
    Y = check_matrix(embedding, name="embedding", min_rows=2)
    if p.shape[0] != Y.shape[0]:
        raise ValueError(f"affinities are {p.shape} but embedding has {Y.shape[0]} rows")
    method = check_method(method)
    s = p - r
    if method == "sne":
        s = s + s.T
        return 2.0 * (s.sum(axis=1)[:, None] * Y - s @ Y)
    c, factor = _method_constants(method, q)
    if c != 0.0:
        sq = np.einsum("ij,ij->i", Y, Y)
        d2 = sq[:, None] + sq[None, :] - 2.0 * (Y @ Y.T)
        np.maximum(d2, 0.0, out=d2)
        s = s / (1.0 + c * d2)
    return factor * (s.sum(axis=1)[:, None] * Y - s @ Y)


def step(embedding, previous, grad, learning_rate, momentum):
    """One momentum update: y - lr * grad + momentum * (y - y_prev)."""
    return embedding - learning_rate * grad + momentum * (embedding - previous)


@dataclass
class TrainingTrace:
    """Per-iteration optimization record plus calibration diagnostics."""

    kl: np.ndarray
    grad_norms: np.ndarray
    calibration_entropy_gap: np.ndarray
    warnings: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)


class _Workspace:
    """Preallocated buffers for the per-iteration weight/KL/gradient passes.

    ``update_state`` leaves the floored kernel weights in ``w`` (zero
    diagonal) and their normalizer in ``z``/``row_z``; ``s`` is scratch shared
    by the log-weight pass and the gradient pass, which is safe because the
    KL value is consumed before ``gradient`` runs.
    """

    def __init__(self, p, method, q, n_components):
        n = p.shape[0]
        self.p = p
        self.method = method
        self.row_normalized = method == "sne"
        self.c, self.factor = _method_constants(method, q)
        # Exponent of the power-form kernel; None selects the exp-form kernel
        # (plain SNE kernels, and the analytic q -> 1 limit exp(-d2/2)).
        if method in ("sne", "ssne"):
            self.k = None
            self.exp_scale = 1.0
        elif _resolve_q(method, q) == 1.0:
            self.k = None
            self.exp_scale = 0.5
        else:
            self.k = 1.0 / (_resolve_q(method, q) - 1.0)
        nz = p > 0
        self.self_entropy = float(np.vdot(p[nz], np.log(p[nz])))
        self.p_row_sums = np.ascontiguousarray(p.sum(axis=1)) if self.row_normalized else None
        self.w = np.empty((n, n))
        self.s = np.empty((n, n))
        self.u = np.empty((n, n)) if self.k is not None else None
        self.m = np.empty((n, n)) if method == "sne" else None
        self.norms = np.empty(n)
        self.row_sums = np.empty(n)
        self.ga = np.empty((n, n_components))
        self.gb = np.empty((n, n_components))
        self.z = None
        self.row_z = np.empty(n)

    def update_state(self, Y):
        """Recompute kernel weights at Y; return KL(p || r(Y))."""
        w, s = self.w, self.s
        np.einsum("ij,ij->i", Y, Y, out=self.norms)
        np.matmul(Y, Y.T, out=s)
        np.multiply(s, -2.0, out=w)
        w += self.norms[:, None]
        w += self.norms[None, :]
        np.maximum(w, 0.0, out=w)              # w = squared distances
        if self.k is not None:
            w *= self.c                        # w = c * d2
            np.log1p(w, out=s)
            s *= -self.k                       # s = log weights
            w += 1.0                           # w = 1 + c * d2
            np.divide(1.0, w, out=self.u)
            if self.k == 1.0:
                np.copyto(w, self.u)
            else:
                np.power(w, -self.k, out=w)
        else:
            np.multiply(w, -self.exp_scale, out=s)
            np.exp(s, out=w)
        # Floor the weights; clip the log weights identically so KL matches
        # the normalized matrix actually used.
        np.maximum(w, PROB_FLOOR, out=w)
        np.maximum(s, _LOG_FLOOR, out=s)
        np.fill_diagonal(w, 0.0)
        cross = np.vdot(self.p, s)
        if self.row_normalized:
            w.sum(axis=1, out=self.row_z)
            lognorm = float(np.dot(self.p_row_sums, np.log(self.row_z)))
        else:
            self.z = w.sum()
            lognorm = float(np.log(self.z))
        return self.self_entropy - float(cross) + lognorm

    def gradient(self, Y, p_target):
        """KL gradient at Y against p_target, using the current state.

        The returned array is a reused buffer: consume it before the next
        call.
        """
        w, s = self.w, self.s
        if self.row_normalized:
            np.divide(w, self.row_z[:, None], out=s)
            np.subtract(p_target, s, out=s)
            np.add(s, s.T, out=self.m)
            s = self.m
            factor = 2.0
        else:
            np.multiply(w, -1.0 / self.z, out=s)
            s += p_target
            if self.k is not None:
                s *= self.u
            factor = self.factor
        np.einsum("ij->i", s, out=self.row_sums)
        np.matmul(s, Y, out=self.gb)
        np.multiply(self.row_sums[:, None], Y, out=self.ga)
        self.ga -= self.gb
        self.ga *= factor
        return self.ga


def embed(X, *, n_components=2, perplexity=30.0, method="qsne", q=2.0,
          learning_rate=200.0, n_iter=1000, momentum_early=0.5,
          momentum_late=0.8, momentum_switch=250, exaggeration=12.0,
          exaggeration_iters=250, init="random", init_scale=1e-4,
          entropy_tolerance=1e-5, max_bisection_steps=50, random_state=0):
    """Embed X into n_components dimensions; returns (embedding, trace).

    The pipeline is: bandwidth calibration at the target perplexity,
    conditional affinities (symmetrized into joint probabilities for every
    method except plain sne), gradient descent with the two-phase momentum
    schedule, and early exaggeration (the high-dimensional probabilities are
    scaled by ``exaggeration`` for the first ``exaggeration_iters`` updates,
    then the untouched originals are used again).  The recorded KL trace is
    always measured against the unexaggerated probabilities, so every entry
    is a true divergence (nonnegative).  Deterministic for a fixed seed.
    """
    X = check_matrix(X, min_rows=2)
    method = check_method(method)
    q_eff = _resolve_q(method, q)
    n = X.shape[0]
    n_components = int(n_components)
    n_iter = int(n_iter)
    if n_components < 1:
        raise ValueError("n_components must be at least 1")
    if n_iter < 1:
        raise ValueError("n_iter must be at least 1")
    if learning_rate <= 0:
        raise ValueError("learning_rate must be positive")
    for name, m in (("momentum_early", momentum_early), ("momentum_late", momentum_late)):
        if not 0.0 <= m < 1.0:
            raise ValueError(f"{name} must lie in [0, 1), got {m}")
    if exaggeration <= 0:
        raise ValueError("exaggeration must be positive")
    if exaggeration_iters < 0 or momentum_switch < 0:
        raise ValueError("exaggeration_iters and momentum_switch must be nonnegative")
    if init_scale <= 0:
        raise ValueError("init_scale must be positive")

    timings = {}
    t0 = time.perf_counter()
    sigmas, entropy_gap = calibrate_bandwidths(
        X, perplexity, entropy_tolerance=entropy_tolerance,
        max_bisection_steps=max_bisection_steps)
    warnings = []
    n_bad = int((entropy_gap > entropy_tolerance).sum())
    if n_bad:
        warnings.append(
            f"bandwidth search did not converge for {n_bad} of {n} points "
            f"(max entropy gap {entropy_gap.max():.3e})")
    cond = conditional_affinities(X, sigmas)
    p = cond if method == "sne" else symmetrize(cond)
    timings["affinities_s"] = time.perf_counter() - t0

    if isinstance(init, str):
        if init != "random":
            raise ValueError(f"init must be 'random' or an array, got {init!r}")
        rng = np.random.default_rng(random_state)
        Y = rng.normal(0.0, init_scale, size=(n, n_components))
    else:
        Y = check_matrix(init, name="init", min_rows=2)
        if Y.shape != (n, n_components):
            raise ValueError(f"init must have shape ({n}, {n_components}), got {Y.shape}")
        Y = Y.copy()

    exaggeration_end = min(int(exaggeration_iters), n_iter)
    p_exagg = p * exaggeration if exaggeration_end > 0 else p

    t0 = time.perf_counter()
    ws = _Workspace(p, method, q_eff, n_components)
    kl = np.empty(n_iter)
    grad_norms = np.empty(n_iter)
    Y_prev = Y
    # Overflow inside a diverging iteration is caught by the explicit
    # finiteness checks below; suppress the transient warnings it spews.
    with np.errstate(over="ignore", invalid="ignore"):
        ws.update_state(Y)
        for t in range(n_iter):
            p_target = p_exagg if t < exaggeration_end else p
            g = ws.gradient(Y, p_target)
            grad_norms[t] = np.abs(g).max()
            momentum = momentum_early if t < momentum_switch else momentum_late
            Y_next = step(Y, Y_prev, g, learning_rate, momentum)
            if not np.isfinite(Y_next).all():
                raise DivergenceError(
                    f"embedding coordinates became non-finite at iteration {t}; "
                    f"try a smaller learning rate")
            Y_prev, Y = Y, Y_next
            kl[t] = ws.update_state(Y)
            if not np.isfinite(kl[t]):
                raise DivergenceError(
                    f"KL divergence became non-finite at iteration {t}; "
                    f"try a smaller learning rate")
    timings["optimization_s"] = time.perf_counter() - t0

    trace = TrainingTrace(kl=kl, grad_norms=grad_norms,
                          calibration_entropy_gap=entropy_gap,
                          warnings=warnings, timings=timings)
    return Y, trace
