import math

import numpy as np
import pytest

from mohv.gp import (
    CholeskyError,
    KernelSpec,
    cholesky_with_jitter,
    fit,
    information_gain,
    kernel_eval,
    posterior_mean_var,
    sample_posterior,
)

SE = KernelSpec("squared_exponential", lengthscale=0.3, amplitude=1.0)
M52 = KernelSpec("matern52", lengthscale=0.25, amplitude=1.0)


class TestKernel:
    @pytest.mark.parametrize("spec", [SE, M52, KernelSpec("squared_exponential", 0.7, 2.5)])
    def test_diagonal_is_amplitude(self, spec):
        assert kernel_eval(spec, [0.3, 0.1], [0.3, 0.1]) == spec.amplitude

    def test_se_at_one_lengthscale(self):
        spec = KernelSpec("squared_exponential", lengthscale=0.4)
        assert kernel_eval(spec, [0.0, 0.0], [0.4, 0.0]) == pytest.approx(math.exp(-0.5), abs=1e-15)

    def test_matern_decays(self):
        assert kernel_eval(M52, [0.0], [50.0]) < 1e-100

    def test_matern_closed_form(self):
        r = math.sqrt(5) * 0.1 / 0.25
        assert kernel_eval(M52, [0.0, 0.0], [0.06, 0.08]) == pytest.approx((1 + r + r * r / 3) * math.exp(-r))

    def test_symmetry_exact(self, rng):
        for spec in (SE, M52):
            for _ in range(100):
                a, b = rng.random(5), rng.random(5)
                assert kernel_eval(spec, a, b) == kernel_eval(spec, b, a)

    def test_gram_matches_pointwise(self, rng):
        A, B = rng.random((6, 3)), rng.random((4, 3))
        for spec in (SE, M52):
            G = spec(A, B)
            ref = np.array([[kernel_eval(spec, a, b) for b in B] for a in A])
            np.testing.assert_allclose(G, ref, atol=1e-12)

    def test_gram_is_psd(self, rng):
        X = rng.random((40, 2))
        for spec in (SE, M52):
            assert np.linalg.eigvalsh(spec(X, X)).min() > -1e-10

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            kernel_eval(SE, [0, 0], [0, 0, 0])

    def test_bad_hyperparameters(self):
        with pytest.raises(ValueError):
            KernelSpec("matern52", lengthscale=0.0)
        with pytest.raises(ValueError):
            KernelSpec("rbf")


class TestFit:
    def test_prior(self, rng):
        model = fit(SE, np.zeros((0, 3)), [])
        mean, var = model.mean_var(rng.random((7, 3)))
        np.testing.assert_array_equal(mean, 0.0)
        np.testing.assert_array_equal(var, SE.amplitude)
        assert posterior_mean_var(model, [0.1, 0.2, 0.3]) == (0.0, 1.0)

    def test_single_point_interpolation(self):
        model = fit(SE, [[0.2, 0.7]], [1.7])
        mean, var = posterior_mean_var(model, [0.2, 0.7])
        assert abs(mean - 1.7) <= 1e-10
        assert var <= 1e-8

    def test_solve_residual(self, rng):
        X, y = rng.random((5, 2)), rng.normal(size=5)
        for noise in (0.0, 0.01):
            model = fit(M52, X, y, noise)
            K = M52(X, X) + noise * np.eye(5)
            assert np.max(np.abs(K @ model.alpha - y)) <= 1e-8

    def test_factor_reproduces_matrix(self, rng):
        X = rng.random((8, 3))
        model = fit(M52, X, rng.normal(size=8), 0.05)
        target = M52(X, X) + (0.05 + model.jitter) * np.eye(8)
        np.testing.assert_allclose(model.factor @ model.factor.T, target, atol=1e-8)

    def test_far_field_variance(self, rng):
        model = fit(SE, rng.random((6, 2)), rng.normal(size=6))
        _, var = posterior_mean_var(model, [40.0, 40.0])
        assert abs(var - SE.amplitude) <= 1e-6

    def test_noiseless_interpolation_ten_points(self, rng):
        X, y = rng.random((10, 4)), rng.normal(size=10)
        model = fit(M52, X, y)
        mean, var = model.mean_var(X)
        assert np.max(np.abs(mean - y)) <= 1e-6
        assert np.max(var) <= 1e-8

    def test_variance_nonnegative(self, rng):
        X = rng.random((30, 2))
        model = fit(SE, X, rng.normal(size=30))
        _, var = model.mean_var(np.vstack([X, rng.random((50, 2))]))
        assert np.all(var >= 0)

    def test_duplicate_inputs_use_jitter(self):
        model = fit(SE, [[0.5], [0.5]], [1.0, 1.0])
        assert model.jitter > 0
        assert posterior_mean_var(model, [0.5])[0] == pytest.approx(1.0, abs=1e-4)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            fit(SE, np.zeros((3, 2)), np.zeros(2))

    def test_negative_noise(self):
        with pytest.raises(ValueError):
            fit(SE, [[0.0]], [0.0], noise=-1.0)

    def test_cholesky_failure_is_reported(self):
        with pytest.raises(CholeskyError, match="not positive definite"):
            cholesky_with_jitter(np.array([[1.0, 0.0], [0.0, -1.0]]))


class TestProperties:
    def test_contraction(self, rng):
        for _ in range(30):
            n = int(rng.integers(1, 4))
            X = rng.random((int(rng.integers(1, 8)), n))
            y = rng.normal(size=len(X))
            Xq = rng.random((50, n))
            _, before = fit(M52, X, y).mean_var(Xq)
            x_new = rng.random((1, n))
            _, after = fit(M52, np.vstack([X, x_new]), np.append(y, rng.normal())).mean_var(Xq)
            assert np.all(after <= before + 1e-8)

    def test_prior_recovery_with_huge_noise(self, rng):
        X, y = rng.random((10, 2)), rng.normal(size=10) * 3
        model = fit(SE, X, y, noise=1e8)
        grid = np.stack(np.meshgrid(np.linspace(0, 1, 15), np.linspace(0, 1, 15)), -1).reshape(-1, 2)
        mean, _ = model.mean_var(grid)
        assert np.max(np.abs(mean)) <= 1e-3

    def test_objectives_are_independent(self, rng):
        X = rng.random((6, 2))
        Y = rng.normal(size=(6, 3))
        Xq = rng.random((10, 2))
        models = [fit(M52, X, Y[:, j]) for j in range(3)]
        perm = [2, 0, 1]
        permuted = [fit(M52, X, Y[:, j]) for j in perm]
        for i, j in enumerate(perm):
            a, b = models[j].mean_var(Xq), permuted[i].mean_var(Xq)
            np.testing.assert_array_equal(a[0], b[0])
            np.testing.assert_array_equal(a[1], b[1])


class TestSampling:
    def test_single_candidate_moments(self, rng):
        X, y = rng.random((4, 2)), rng.normal(size=4)
        model = fit(SE, X, y, noise=0.01)
        x = rng.random((1, 2))
        mu, var = posterior_mean_var(model, x[0])
        draws = np.array([sample_posterior(model, x, np.random.default_rng(s))[0] for s in range(10_000)])
        se = math.sqrt(var / len(draws))
        assert abs(draws.mean() - mu) <= 4 * se
        assert draws.var(ddof=1) == pytest.approx(var, rel=0.05)

    def test_training_point_matches_target(self, rng):
        model = fit(SE, [[0.3, 0.3]], [2.0])
        C = np.vstack([[0.3, 0.3], rng.random((20, 2))])
        for seed in range(20):
            assert abs(sample_posterior(model, C, np.random.default_rng(seed))[0] - 2.0) <= 1e-4

    def test_duplicate_candidates(self, rng):
        model = fit(M52, rng.random((3, 2)), rng.normal(size=3))
        c = rng.random(2)
        C = np.vstack([c, rng.random((5, 2)), c])
        for seed in range(20):
            draw = sample_posterior(model, C, np.random.default_rng(seed))
            assert abs(draw[0] - draw[-1]) <= 1e-3

    def test_deterministic(self, rng):
        model = fit(M52, rng.random((3, 2)), rng.normal(size=3))
        C = rng.random((30, 2))
        a = sample_posterior(model, C, np.random.default_rng(4))
        b = sample_posterior(model, C, np.random.default_rng(4))
        np.testing.assert_array_equal(a, b)

    def test_empty_candidates(self, rng):
        model = fit(SE, np.zeros((0, 2)), [])
        with pytest.raises(ValueError):
            sample_posterior(model, np.zeros((0, 2)), rng)


class TestInformationGain:
    def test_identity(self):
        assert abs(information_gain(np.eye(2), 1.0) - math.log(2)) <= 1e-10

    def test_zero(self):
        assert information_gain(np.zeros((3, 3)), 0.5) == 0.0

    def test_eigen_oracle(self, rng):
        for noise in (0.1, 1.0, 3.0):
            A = rng.normal(size=(5, 5))
            K = A @ A.T
            eig = np.linalg.eigvalsh(np.eye(5) + K / noise)
            assert abs(information_gain(K, noise) - 0.5 * np.sum(np.log(eig))) <= 1e-8

    def test_monotone_on_nested_sets(self, rng):
        X = rng.random((12, 3))
        K = M52(X, X)
        gains = [information_gain(K[:t, :t], 0.1) for t in range(1, 13)]
        assert np.all(np.diff(gains) >= 0)
        assert gains[0] >= 0

    @pytest.mark.parametrize("noise", [0.0, -1.0])
    def test_bad_noise(self, noise):
        with pytest.raises(ValueError):
            information_gain(np.eye(2), noise)
