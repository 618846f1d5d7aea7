"""Estimator front end for the embedding optimizer."""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .descent import embed


class QSNE(BaseEstimator):
    """Neighbor embedding with a q-Gaussian low-dimensional kernel.

    With method="qsne" the low-dimensional similarity of a pair at squared
    distance d2 is proportional to (1 + (q-1)/(3-q) * d2)^(-1/(q-1)).  q = 2
    reproduces t-SNE exactly, q -> 1 approaches a Gaussian kernel, and larger
    q gives heavier tails (tighter clusters).  method="tsne" is the q = 2
    special case, method="ssne" uses the Gaussian joint kernel, and
    method="sne" uses per-point conditional Gaussian distributions.

    Parameters
    ----------
    n_components : int, target dimension (2 or 3 for visualization).
    perplexity : float, effective neighbor count for bandwidth calibration;
        must lie in (1, n_samples).
    method : {"qsne", "tsne", "ssne", "sne"}
    q : float in [1, 3), kernel shape for method="qsne".
    learning_rate : float, gradient step size.
    n_iter : int, number of momentum updates.
    momentum_early, momentum_late : floats in [0, 1); the coefficient
        switches from early to late at iteration ``momentum_switch``.
    exaggeration : float, factor applied to the high-dimensional
        probabilities for the first ``exaggeration_iters`` iterations.
    init : "random" or array of shape (n_samples, n_components).
    init_scale : float, standard deviation of the random initialization.
    entropy_tolerance, max_bisection_steps : bandwidth search controls.
    random_state : int, seed for the random initialization.

    Attributes
    ----------
    embedding_ : array of shape (n_samples, n_components)
    kl_trace_ : array of shape (n_iter,), KL divergence after each update
        (always measured against the unexaggerated probabilities).
    trace_ : TrainingTrace with gradient norms, calibration diagnostics and
        phase timings.
    """

    def __init__(self, n_components=2, perplexity=30.0, method="qsne", q=2.0,
                 learning_rate=200.0, n_iter=1000, momentum_early=0.5,
                 momentum_late=0.8, momentum_switch=250, exaggeration=12.0,
                 exaggeration_iters=250, init="random", init_scale=1e-4,
                 entropy_tolerance=1e-5, max_bisection_steps=50,
                 random_state=0):
        self.n_components = n_components
        self.perplexity = perplexity
        self.method = method
        self.q = q
        self.learning_rate = learning_rate
        self.n_iter = n_iter
        self.momentum_early = momentum_early
        self.momentum_late = momentum_late
        self.momentum_switch = momentum_switch
        self.exaggeration = exaggeration
        self.exaggeration_iters = exaggeration_iters
        self.init = init
        self.init_scale = init_scale
        self.entropy_tolerance = entropy_tolerance
        self.max_bisection_steps = max_bisection_steps
        self.random_state = random_state

    def fit(self, X, y=None):
        """Compute the embedding of X.  y is ignored."""
        embedding, trace = embed(
            X,
            n_components=self.n_components,
            perplexity=self.perplexity,
            method=self.method,
            q=self.q,
            learning_rate=self.learning_rate,
            n_iter=self.n_iter,
            momentum_early=self.momentum_early,
            momentum_late=self.momentum_late,
            momentum_switch=self.momentum_switch,
            exaggeration=self.exaggeration,
            exaggeration_iters=self.exaggeration_iters,
            init=self.init,
            init_scale=self.init_scale,
            entropy_tolerance=self.entropy_tolerance,
            max_bisection_steps=self.max_bisection_steps,
            random_state=self.random_state,
        )
        self.embedding_ = embedding
        self.kl_trace_ = trace.kl
        self.trace_ = trace
        return self

    def fit_transform(self, X, y=None):
        """Fit and return the embedding coordinates."""
        self.fit(X)
        return self.embedding_

    def transform(self, X=None):
        """Return the fitted embedding (non-parametric: no out-of-sample map)."""
        if not hasattr(self, "embedding_"):
            raise NotFittedError("this QSNE instance is not fitted yet")
        if X is not None and np.asarray(X).shape[0] != self.embedding_.shape[0]:
            raise ValueError("QSNE cannot embed unseen samples; transform only "
                             "returns the coordinates of the fitted data")
        return self.embedding_
