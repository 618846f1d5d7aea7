import math

import numpy as np
import pytest

from qsne import (calibrate_bandwidths, conditional_affinities, embed,
                  gradient, kl_divergence, low_dim_affinities, step,
                  symmetrize)
from qsne.descent import _Workspace
from qsne.exceptions import DivergenceError

ALL_CONFIGS = [("sne", None), ("ssne", None), ("tsne", None),
               ("qsne", 1.0), ("qsne", 1.1), ("qsne", 1.5),
               ("qsne", 2.0), ("qsne", 2.5), ("qsne", 2.9)]


def make_instance(seed, n=20, d_high=5, d_low=2):
    # Embedding scale 0.6 keeps every kernel weight above the probability
    # floor (exp(-d2) underflows it near d2 ~ 28), so the analytic gradient
    # formulas are exact and finite differences must agree.
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, d_high))
    Y = 0.6 * rng.normal(size=(n, d_low))
    sigmas, _ = calibrate_bandwidths(X, min(10.0, n / 2))
    cond = conditional_affinities(X, sigmas)
    return X, Y, cond


def affinities_for(method, q, Y):
    if method == "sne":
        return low_dim_affinities(Y, "sne_conditional")
    if method == "ssne":
        return low_dim_affinities(Y, "sne_symmetric")
    return low_dim_affinities(Y, "qgaussian", 2.0 if method == "tsne" else q)


class TestKLDivergence:
    def test_identical_distributions(self):
        rng = np.random.default_rng(0)
        Y = rng.normal(size=(10, 2))
        r = low_dim_affinities(Y, "qgaussian", 2.0)
        assert kl_divergence(r, r) == 0.0

    def test_direct_summation_oracle(self):
        # p uniform over the 6 ordered pairs of 3 points; r halves one pair's
        # mass and renormalizes.
        p = np.full((3, 3), 1.0 / 6.0)
        np.fill_diagonal(p, 0.0)
        r = p.copy()
        r[0, 1] = 1.0 / 12.0
        r /= r.sum()
        expected = sum(p[i, j] * math.log(p[i, j] / r[i, j])
                       for i in range(3) for j in range(3) if i != j)
        assert kl_divergence(p, r) == pytest.approx(expected, rel=1e-14)

    @pytest.mark.parametrize("seed", range(4))
    def test_nonnegative(self, seed):
        rng = np.random.default_rng(seed)
        Y1 = rng.normal(size=(15, 2))
        Y2 = rng.normal(size=(15, 2))
        p = low_dim_affinities(Y1, "qgaussian", 1.5)
        r = low_dim_affinities(Y2, "qgaussian", 2.5)
        assert kl_divergence(p, r) >= 0.0

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            kl_divergence(np.ones((3, 3)) / 6.0, np.ones((4, 4)) / 12.0)

    def test_family_mismatch(self):
        rng = np.random.default_rng(1)
        Y = rng.normal(size=(8, 2))
        row = low_dim_affinities(Y, "sne_conditional")
        joint = low_dim_affinities(Y, "sne_symmetric")
        with pytest.raises(ValueError):
            kl_divergence(row, joint)


class TestGradient:
    def test_zero_when_p_equals_r(self):
        rng = np.random.default_rng(0)
        Y = rng.normal(size=(12, 2))
        for method, q in ALL_CONFIGS:
            r = affinities_for(method, q, Y)
            g = gradient(r, r, Y, method, q if q is not None else 2.0)
            np.testing.assert_allclose(g, 0.0, atol=1e-15)

    def test_qsne_at_q2_is_bitwise_tsne(self):
        _, Y, cond = make_instance(3, n=50)
        p = symmetrize(cond)
        r = low_dim_affinities(Y, "qgaussian", 2.0)
        g_t = gradient(p, r, Y, "tsne")
        g_q = gradient(p, r, Y, "qsne", 2.0)
        np.testing.assert_array_equal(g_t, g_q)

    def test_tsne_gradient_matches_direct_formula(self):
        _, Y, cond = make_instance(4, n=25)
        p = symmetrize(cond)
        r = low_dim_affinities(Y, "qgaussian", 2.0)
        n = Y.shape[0]
        expected = np.zeros_like(Y)
        for i in range(n):
            for j in range(n):
                d2 = np.sum((Y[i] - Y[j]) ** 2)
                expected[i] += 4.0 * (p[i, j] - r[i, j]) * (Y[i] - Y[j]) / (1.0 + d2)
        np.testing.assert_allclose(gradient(p, r, Y, "tsne"), expected, atol=1e-12)

    @pytest.mark.parametrize("method,q", ALL_CONFIGS)
    def test_matches_finite_differences(self, method, q):
        for seed in (0, 1):
            X, Y, cond = make_instance(seed)
            p = cond if method == "sne" else symmetrize(cond)
            r = affinities_for(method, q, Y)
            g = gradient(p, r, Y, method, q if q is not None else 2.0)
            h = 1e-5
            fd = np.zeros_like(Y)
            for i in range(Y.shape[0]):
                for m in range(Y.shape[1]):
                    yp = Y.copy()
                    yp[i, m] += h
                    ym = Y.copy()
                    ym[i, m] -= h
                    fd[i, m] = (kl_divergence(p, affinities_for(method, q, yp))
                                - kl_divergence(p, affinities_for(method, q, ym))) / (2 * h)
            rel = np.linalg.norm(g - fd) / np.linalg.norm(fd)
            assert rel < 1e-4, f"{method} q={q} seed={seed}: rel error {rel:.2e}"

    def test_q_domain_error(self):
        _, Y, cond = make_instance(0)
        p = symmetrize(cond)
        r = low_dim_affinities(Y, "qgaussian", 2.0)
        with pytest.raises(ValueError):
            gradient(p, r, Y, "qsne", 3.0)


class TestStep:
    def test_plain_gradient_descent(self):
        y = np.array([[1.0, 2.0], [3.0, 4.0]])
        g = np.array([[0.5, 0.0], [0.0, -1.0]])
        np.testing.assert_array_equal(step(y, y, g, 2.0, 0.0), y - 2.0 * g)

    def test_pure_momentum(self):
        y = np.array([[1.0, 1.0]])
        prev = np.array([[0.0, 2.0]])
        out = step(y, prev, np.zeros((1, 2)), 200.0, 0.5)
        np.testing.assert_array_equal(out, y + 0.5 * (y - prev))

    def test_identity(self):
        rng = np.random.default_rng(0)
        y = rng.normal(size=(5, 2))
        out = step(y, rng.normal(size=(5, 2)), rng.normal(size=(5, 2)), 0.0, 0.0)
        np.testing.assert_array_equal(out, y)


class TestEmbed:
    def test_two_points_are_trivially_matched(self):
        X = np.array([[0.0, 0.0], [1.0, 1.0]])
        Y, trace = embed(X, perplexity=1.5, n_iter=50, random_state=0)
        assert trace.kl[-1] < 1e-3

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(40, 4))
        y1, t1 = embed(X, perplexity=10, n_iter=40, random_state=9)
        y2, t2 = embed(X, perplexity=10, n_iter=40, random_state=9)
        np.testing.assert_array_equal(y1, y2)
        np.testing.assert_array_equal(t1.kl, t2.kl)

    def test_tsne_is_bitwise_qsne_at_q2(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(50, 6))
        y_t, t_t = embed(X, method="tsne", perplexity=12, n_iter=60, random_state=4)
        y_q, t_q = embed(X, method="qsne", q=2.0, perplexity=12, n_iter=60, random_state=4)
        np.testing.assert_array_equal(y_t, y_q)
        np.testing.assert_array_equal(t_t.kl, t_q.kl)

    # conditional-SNE probabilities are ~n times larger than joint ones, so
    # each method gets a learning rate matched to its gradient scale
    @pytest.mark.parametrize("method,q,lr", [("sne", 2.0, 0.1), ("ssne", 2.0, 1.0),
                                             ("tsne", 2.0, 20.0), ("qsne", 1.5, 20.0)])
    def test_kl_trace_finite_and_decreasing_overall(self, method, q, lr):
        rng = np.random.default_rng(2)
        X = np.concatenate([rng.normal(size=(30, 5)),
                            rng.normal(size=(30, 5)) + 4.0])
        exaggeration_iters = 0 if method == "sne" else 40
        Y, trace = embed(X, method=method, q=q, perplexity=10, n_iter=300,
                         learning_rate=lr, exaggeration_iters=exaggeration_iters,
                         momentum_switch=50, random_state=0)
        assert np.all(np.isfinite(trace.kl))
        assert np.all(trace.kl >= 0.0)
        assert trace.kl[-1] < trace.kl[0]

    def test_final_kl_matches_public_recomputation(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(30, 4))
        for method, q in [("sne", 2.0), ("ssne", 2.0), ("qsne", 1.5), ("qsne", 1.0)]:
            Y, trace = embed(X, method=method, q=q, perplexity=8, n_iter=30,
                             learning_rate=50.0, random_state=1)
            family = {"sne": "sne_conditional", "ssne": "sne_symmetric"}.get(method, "qgaussian")
            r = low_dim_affinities(Y, family, q)
            sigmas, _ = calibrate_bandwidths(X, 8)
            cond = conditional_affinities(X, sigmas)
            p = cond if method == "sne" else symmetrize(cond)
            assert trace.kl[-1] == pytest.approx(kl_divergence(p, r), rel=1e-9)

    def test_exaggeration_target_restored_exactly(self, monkeypatch):
        rng = np.random.default_rng(4)
        X = rng.normal(size=(25, 3))
        recorded = []
        original = _Workspace.gradient

        def spy(self, Y, p_target):
            recorded.append(p_target)
            return original(self, Y, p_target)

        monkeypatch.setattr(_Workspace, "gradient", spy)
        embed(X, perplexity=8, n_iter=7, exaggeration=12.0, exaggeration_iters=3,
              random_state=0)
        early, late = recorded[:3], recorded[3:]
        assert all(p is early[0] for p in early)
        assert all(p is late[0] for p in late)
        # the restored target is exactly the original joint distribution
        sigmas, _ = calibrate_bandwidths(X, 8)
        p_original = symmetrize(conditional_affinities(X, sigmas))
        np.testing.assert_array_equal(late[0], p_original)
        np.testing.assert_array_equal(early[0], p_original * 12.0)

    def test_exaggeration_factor_irrelevant_when_disabled(self):
        rng = np.random.default_rng(5)
        X = rng.normal(size=(30, 3))
        y1, t1 = embed(X, perplexity=8, n_iter=30, exaggeration=12.0,
                       exaggeration_iters=0, random_state=2)
        y2, t2 = embed(X, perplexity=8, n_iter=30, exaggeration=3.5,
                       exaggeration_iters=0, random_state=2)
        np.testing.assert_array_equal(y1, y2)
        np.testing.assert_array_equal(t1.kl, t2.kl)

    def test_divergence_raises(self):
        rng = np.random.default_rng(6)
        X = rng.normal(size=(20, 3))
        with pytest.raises(DivergenceError):
            embed(X, perplexity=5, n_iter=50, learning_rate=1e300, random_state=0)

    def test_kl_trace_invariant_under_joint_permutation(self):
        # Permuting samples and the initialization together must leave the
        # trace unchanged.  Agreement is asserted over a short horizon only:
        # summation-order round-off grows exponentially through the chaotic
        # descent, while an actual equivariance bug would show up at O(1)
        # from the first iteration.
        rng = np.random.default_rng(7)
        X = rng.normal(size=(40, 4))
        Y0 = rng.normal(size=(40, 2)) * 1e-4
        perm = rng.permutation(40)
        common = dict(perplexity=10, n_iter=15, learning_rate=50.0,
                      exaggeration_iters=0, random_state=0)
        _, t1 = embed(X, init=Y0, **common)
        _, t2 = embed(X[perm], init=Y0[perm], **common)
        np.testing.assert_allclose(t1.kl, t2.kl, rtol=1e-8)

    def test_calibration_warning_is_reported(self):
        rng = np.random.default_rng(8)
        X = rng.normal(size=(30, 3))
        _, trace = embed(X, perplexity=10, n_iter=5, max_bisection_steps=2,
                         random_state=0)
        assert trace.warnings and "did not converge" in trace.warnings[0]

    def test_invalid_configs(self):
        X = np.random.default_rng(0).normal(size=(10, 2))
        with pytest.raises(ValueError):
            embed(X, n_iter=0)
        with pytest.raises(ValueError):
            embed(X, learning_rate=0.0)
        with pytest.raises(ValueError):
            embed(X, momentum_early=1.0)
        with pytest.raises(ValueError):
            embed(X, method="umap")
        with pytest.raises(ValueError):
            embed(X, method="qsne", q=0.9)
        with pytest.raises(ValueError):
            embed(X, init=np.zeros((3, 2)))
