import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mohv.pareto import hypervolume_exact, hypervolume_exact_2d
from mohv.scalarization import (
    WEIGHT_FLOOR,
    Scalarization,
    c_k,
    chebyshev_scalarization,
    estimate_hypervolume_mc,
    hypervolume_scalarization,
    linear_scalarization,
    required_samples,
    sample_weight,
    sample_weights,
)

R2 = 1 / math.sqrt(2)


class TestWeights:
    def test_k1_is_one(self, rng):
        for _ in range(10):
            assert sample_weight(rng, 1).tolist() == [1.0]

    def test_unit_norm_and_positive(self, rng):
        lam = sample_weights(rng, 4, 5000)
        np.testing.assert_allclose(np.linalg.norm(lam, axis=1), 1.0, atol=1e-12)
        assert np.all(lam >= WEIGHT_FLOOR / 2)

    def test_mean_first_coordinate_k2(self):
        # uniform angle on the quarter circle: E[cos t] = (2/pi) * int_0^{pi/2} cos t dt = 2/pi
        lam = sample_weights(np.random.default_rng(0), 2, 100_000)
        assert abs(lam[:, 0].mean() - 2 / math.pi) <= 0.01

    def test_angle_is_uniform_k2(self):
        lam = sample_weights(np.random.default_rng(1), 2, 100_000)
        theta = np.arctan2(lam[:, 1], lam[:, 0])
        counts, _ = np.histogram(theta, bins=8, range=(0, math.pi / 2))
        np.testing.assert_allclose(counts / len(theta), 1 / 8, atol=0.005)

    def test_deterministic(self):
        a = sample_weights(np.random.default_rng(3), 3, 10)
        b = sample_weights(np.random.default_rng(3), 3, 10)
        np.testing.assert_array_equal(a, b)

    def test_bad_k(self, rng):
        with pytest.raises(ValueError):
            sample_weight(rng, 0)


class TestHypervolumeScalarization:
    def test_diagonal(self):
        assert hypervolume_scalarization([R2, R2], [1, 1], [0, 0]) == pytest.approx(2.0, abs=1e-12)

    def test_clipped(self):
        assert hypervolume_scalarization([0.3, 0.9], [-1, 5], [0, 0]) == 0.0

    def test_k1_identity(self):
        assert hypervolume_scalarization([1.0], [3.0], [0.0]) == 3.0

    def test_zero_weight_rejected(self):
        with pytest.raises(ValueError):
            hypervolume_scalarization([1.0, 0.0], [1, 1], [0, 0])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            hypervolume_scalarization([R2, R2], [1, 1, 1], [0, 0, 0])

    def test_batch(self):
        out = hypervolume_scalarization([R2, R2], [[1, 1], [2, 2], [-1, 3]], [0, 0])
        np.testing.assert_allclose(out, [2.0, 8.0, 0.0])

    def test_zero_iff_some_coordinate_at_or_below_reference(self, rng):
        for _ in range(200):
            lam = sample_weight(rng, 3)
            y = rng.normal(size=3)
            s = hypervolume_scalarization(lam, y, np.zeros(3))
            assert (s == 0.0) == bool(np.any(y <= 0))


class TestOtherScalarizations:
    def test_chebyshev_examples(self):
        assert chebyshev_scalarization([1, 0.5], [2, 4], [0, 0]) == 2.0
        assert chebyshev_scalarization([0.2, 0.7], [1, 1], [1, 1]) == 0.0
        assert chebyshev_scalarization([1, 1], [0, 5], [1, 1]) == -1.0

    def test_linear_examples(self):
        assert linear_scalarization([R2, R2], [1, 1]) == pytest.approx(math.sqrt(2))
        assert linear_scalarization([0.6, 0.8], [0, 0]) == 0.0
        assert linear_scalarization([1, 0], [3.5, -2]) == 3.5

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            chebyshev_scalarization([1, 1], [1, 1, 1], [0, 0, 0])
        with pytest.raises(ValueError):
            linear_scalarization([1, 1], [1])

    def test_dispatch(self):
        s = Scalarization("chebyshev", reference=[1, 1])
        assert s([1, 1], [0, 5]) == -1.0
        assert Scalarization("linear")([1, 0], [3.5, -2]) == 3.5
        with pytest.raises(ValueError):
            Scalarization("quadratic")


@settings(max_examples=200, deadline=None)
@given(
    kind=st.sampled_from(["hypervolume", "chebyshev", "linear"]),
    k=st.integers(1, 4),
    seed=st.integers(0, 2**32 - 1),
    coord=st.integers(0, 3),
    bump=st.floats(0, 5),
)
def test_scalarizations_are_monotone(kind, k, seed, coord, bump):
    rng = np.random.default_rng(seed)
    s = Scalarization(kind, reference=np.zeros(k))
    lam = sample_weight(rng, k)
    y = rng.normal(size=k)
    y2 = y.copy()
    y2[coord % k] += bump
    assert s(lam, y2) >= s(lam, y)


class TestCk:
    @pytest.mark.parametrize("k, expected", [(1, 1.0), (2, math.pi / 4), (3, math.pi / 6)])
    def test_small_k(self, k, expected):
        assert abs(c_k(k) - expected) <= 1e-12

    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 10, 37, 100, 101, 150])
    def test_matches_gamma_form(self, k):
        ref = math.exp(0.5 * k * math.log(math.pi) - k * math.log(2) - math.lgamma(k / 2 + 1))
        assert c_k(k) == pytest.approx(ref, rel=1e-12)

    def test_orthant_volume_by_sampling(self):
        # fraction of [0,1]^4 inside the unit ball equals c_4
        u = np.random.default_rng(0).random((400_000, 4))
        frac = np.mean(np.sum(u**2, axis=1) <= 1)
        assert frac == pytest.approx(c_k(4), abs=3e-3)


class TestMonteCarlo:
    def test_unit_square(self):
        est = estimate_hypervolume_mc([(1, 1)], [0, 0], 100_000, np.random.default_rng(0))
        assert abs(est - hypervolume_exact_2d([(1, 1)], [0, 0])) <= 0.02

    def test_two_boxes(self):
        Y = [(2, 1), (1, 2)]
        est = estimate_hypervolume_mc(Y, [0, 0], 100_000, np.random.default_rng(1))
        assert abs(est - hypervolume_exact_2d(Y, [0, 0])) <= 0.05

    @pytest.mark.parametrize("s", [1, 7, 1000])
    def test_k1_is_exact(self, s):
        est = estimate_hypervolume_mc([3, 5], [1], s, np.random.default_rng(s))
        assert est == 4.0

    def test_empty_rejected(self, rng):
        with pytest.raises(ValueError):
            estimate_hypervolume_mc(np.zeros((0, 2)), [0, 0], 10, rng)

    def test_deterministic_and_chunk_independent(self):
        Y = np.random.default_rng(5).random((8, 3))
        a = estimate_hypervolume_mc(Y, np.zeros(3), 5000, np.random.default_rng(9), chunk_size=5000)
        b = estimate_hypervolume_mc(Y, np.zeros(3), 5000, np.random.default_rng(9), chunk_size=333)
        assert a == pytest.approx(b, rel=1e-12)

    def test_consistency_within_three_standard_errors(self):
        rng = np.random.default_rng(2024)
        trials, hits = 300, 0
        for _ in range(trials):
            k = int(rng.integers(2, 4))
            m = int(rng.integers(1, 21))
            z = rng.normal(size=k)
            Y = z + rng.random((m, k))
            est, se = estimate_hypervolume_mc(Y, z, 2000, rng, return_stderr=True)
            hits += abs(est - hypervolume_exact(Y, z)) <= 3 * se
        assert hits >= 0.99 * trials

    def test_standard_deviation_scaling(self):
        Y = np.random.default_rng(7).random((10, 2))
        sd = {
            s: np.std([estimate_hypervolume_mc(Y, [0, 0], s, np.random.default_rng(seed)) for seed in range(50)], ddof=1)
            for s in (1000, 10_000)
        }
        assert 2.0 <= sd[1000] / sd[10_000] <= 4.5


def test_lipschitz_bound_on_restricted_weights():
    rng = np.random.default_rng(11)
    checked = 0
    while checked < 10_000:
        k = int(rng.integers(1, 5))
        lam = sample_weight(rng, k)
        if lam.min() < 0.5 / math.sqrt(k):
            continue
        B = 1 + 2 * rng.random()
        z = rng.normal(size=k)
        y = z + B * rng.random(k)
        # half the pairs are close together so the local slope is probed
        y2 = z + B * rng.random(k) if checked % 2 else np.clip(y + 1e-3 * rng.normal(size=k), z, z + B)
        lhs = abs(hypervolume_scalarization(lam, y, z) - hypervolume_scalarization(lam, y2, z))
        bound = 2**k * B**k * k ** (1 + k / 2) * np.abs(y - y2).sum()
        assert lhs <= bound * (1 + 1e-12)
        checked += 1


class TestRequiredSamples:
    def test_example(self):
        assert required_samples(1, 1, 0.1, 0.05) == 185 == math.ceil(math.log(40) / 0.02)

    def test_doubling_eps(self):
        for B, k, eps, d in [(1, 2, 0.01, 0.1), (2, 3, 0.05, 0.01), (1.5, 1, 0.003, 0.2)]:
            a, b = required_samples(B, k, eps, d), required_samples(B, k, 2 * eps, d)
            assert abs(a - 4 * b) <= 4

    def test_monotone(self):
        base = required_samples(1.5, 2, 0.1, 0.1)
        assert required_samples(2, 2, 0.1, 0.1) > base
        assert required_samples(1.5, 3, 0.1, 0.1) > base
        assert required_samples(1.5, 2, 0.2, 0.1) < base
        assert required_samples(1.5, 2, 0.1, 0.2) < base

    @pytest.mark.parametrize("args", [(1, 1, 0.1, 1.0), (1, 1, 0.1, 0.0), (0.5, 1, 0.1, 0.1), (1, 1, 0.0, 0.1), (1, 0, 0.1, 0.1)])
    def test_rejects(self, args):
        with pytest.raises(ValueError):
            required_samples(*args)
