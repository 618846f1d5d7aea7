import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import Pipeline

from qsne import PCA, QSNE


@pytest.fixture(scope="module")
def blobs():
    rng = np.random.default_rng(0)
    X = np.concatenate([rng.normal(size=(25, 6)), rng.normal(size=(25, 6)) + 5.0])
    return X


class TestSklearnProtocol:
    def test_get_set_params_round_trip(self):
        est = QSNE(q=1.5, perplexity=12.0, n_iter=50)
        params = est.get_params()
        assert params["q"] == 1.5 and params["perplexity"] == 12.0
        est.set_params(q=2.5, learning_rate=80.0)
        assert est.q == 2.5 and est.learning_rate == 80.0

    def test_clone(self):
        est = QSNE(method="tsne", n_iter=33, random_state=7)
        copy = clone(est)
        assert copy.get_params() == est.get_params()

    def test_pca_works_in_pipeline(self, blobs):
        pipe = Pipeline([("pca", PCA(n_components=3)),
                         ("embed", QSNE(perplexity=10, n_iter=30, random_state=0))])
        Y = pipe.fit_transform(blobs)
        assert Y.shape == (50, 2)

    def test_fit_returns_self_and_sets_attributes(self, blobs):
        est = QSNE(perplexity=10, n_iter=25, random_state=1)
        assert est.fit(blobs) is est
        assert est.embedding_.shape == (50, 2)
        assert est.kl_trace_.shape == (25,)
        assert est.trace_.grad_norms.shape == (25,)

    def test_fit_transform_matches_fit(self, blobs):
        a = QSNE(perplexity=10, n_iter=25, random_state=2).fit(blobs).embedding_
        b = QSNE(perplexity=10, n_iter=25, random_state=2).fit_transform(blobs)
        np.testing.assert_array_equal(a, b)

    def test_transform_returns_fitted_coordinates(self, blobs):
        est = QSNE(perplexity=10, n_iter=20, random_state=3)
        with pytest.raises(NotFittedError):
            est.transform()
        est.fit(blobs)
        np.testing.assert_array_equal(est.transform(), est.embedding_)
        np.testing.assert_array_equal(est.transform(blobs), est.embedding_)
        with pytest.raises(ValueError):
            est.transform(blobs[:10])

    def test_y_is_ignored(self, blobs):
        labels = np.zeros(50)
        a = QSNE(perplexity=10, n_iter=20, random_state=4).fit_transform(blobs, labels)
        b = QSNE(perplexity=10, n_iter=20, random_state=4).fit_transform(blobs)
        np.testing.assert_array_equal(a, b)

    def test_three_components(self, blobs):
        Y = QSNE(n_components=3, perplexity=10, n_iter=20,
                 random_state=5).fit_transform(blobs)
        assert Y.shape == (50, 3)

    def test_array_init(self, blobs):
        init = np.random.default_rng(6).normal(size=(50, 2)) * 1e-4
        est = QSNE(perplexity=10, n_iter=20, init=init)
        Y1 = est.fit_transform(blobs)
        Y2 = QSNE(perplexity=10, n_iter=20, init=init).fit_transform(blobs)
        np.testing.assert_array_equal(Y1, Y2)
