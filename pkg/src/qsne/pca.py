"""Principal component projection via SVD of the centered data."""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .exceptions import DegenerateDataError
from ._validation import check_matrix


class PCA(BaseEstimator, TransformerMixin):
    """Project data onto its top principal directions.

    The fit is deterministic: each component's sign is fixed by making its
    largest-magnitude entry positive.

    Attributes
    ----------
    mean_ : array of shape (n_features,)
    components_ : array of shape (n_components, n_features), orthonormal rows
        sorted by decreasing explained variance.
    explained_variance_ : array of shape (n_components,), sample variance
        (ddof=1) of the data along each component.
    """

    def __init__(self, n_components=2):
        self.n_components = n_components

    def fit(self, X, y=None):
        X = check_matrix(X, min_rows=2)
        n, d = X.shape
        k = int(self.n_components)
        if not 1 <= k <= min(n, d):
            raise ValueError(
                f"n_components must lie in [1, {min(n, d)}] for data of shape {X.shape}, got {k}")
        self.mean_ = X.mean(axis=0)
        centered = X - self.mean_
        if not centered.any():
            raise DegenerateDataError("data has zero variance; no principal directions exist")
        _, svals, vt = np.linalg.svd(centered, full_matrices=False)
        components = vt[:k].copy()
        for row in components:
            if row[np.argmax(np.abs(row))] < 0:
                row *= -1.0
        self.components_ = components
        self.explained_variance_ = svals[:k] ** 2 / (n - 1)
        return self

    def transform(self, X):
        self._check_fitted()
        X = check_matrix(X)
        if X.shape[1] != self.mean_.shape[0]:
            raise ValueError(
                f"X has {X.shape[1]} features but the model was fit with {self.mean_.shape[0]}")
        return (X - self.mean_) @ self.components_.T

    def inverse_transform(self, Z):
        self._check_fitted()
        Z = check_matrix(Z)
        if Z.shape[1] != self.components_.shape[0]:
            raise ValueError(
                f"Z has {Z.shape[1]} columns but the model keeps {self.components_.shape[0]} components")
        return Z @ self.components_ + self.mean_

    def _check_fitted(self):
        if not hasattr(self, "components_"):
            raise NotFittedError("this PCA instance is not fitted yet")
