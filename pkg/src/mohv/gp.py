"""Exact Gaussian-process regression with fixed hyperparameters.

One ``GpPosterior`` models one objective; multi-objective callers keep a
separate, independent posterior per objective. Posteriors are immutable and
refitting produces a new object.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.linalg import cho_solve, solve_triangular

JITTER_START = 1e-10
JITTER_MAX = 1e-4


class CholeskyError(np.linalg.LinAlgError):
    """Cholesky factorization failed even after jitter escalation."""


@dataclass(frozen=True)
class KernelSpec:
    """Stationary kernel with a single isotropic lengthscale.

    Squared exponential: ``a * exp(-r^2 / (2 l^2))``.
    Matern-5/2: ``a * (1 + sqrt5 r/l + 5 r^2 / (3 l^2)) * exp(-sqrt5 r/l)``.
    """

    family: Literal["squared_exponential", "matern52"] = "matern52"
    lengthscale: float = 0.25
    amplitude: float = 1.0

    def __post_init__(self):
        if self.family not in ("squared_exponential", "matern52"):
            raise ValueError(f"unknown kernel family {self.family!r}")
        if not (self.lengthscale > 0 and self.amplitude > 0):
            raise ValueError("kernel lengthscale and amplitude must be positive")

    def __call__(self, A, B) -> np.ndarray:
        """Gram matrix between the rows of ``A`` and ``B``."""
        A = np.atleast_2d(np.asarray(A, dtype=np.float64))
        B = np.atleast_2d(np.asarray(B, dtype=np.float64))
        if A.shape[1] != B.shape[1]:
            raise ValueError(f"input dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
        sq = (
            np.sum(A**2, axis=1)[:, None]
            + np.sum(B**2, axis=1)[None, :]
            - 2.0 * A @ B.T
        )
        sq = np.maximum(sq, 0.0) / self.lengthscale**2
        if self.family == "squared_exponential":
            return self.amplitude * np.exp(-0.5 * sq)
        r = np.sqrt(5.0 * sq)
        return self.amplitude * (1.0 + r + r**2 / 3.0) * np.exp(-r)


def kernel_eval(spec: KernelSpec, x, x_prime) -> float:
    """Kernel value between two single inputs."""
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    x_prime = np.atleast_1d(np.asarray(x_prime, dtype=np.float64))
    if x.shape != x_prime.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {x_prime.shape}")
    d2 = float(np.sum((x - x_prime) ** 2)) / spec.lengthscale**2
    if spec.family == "squared_exponential":
        return spec.amplitude * math.exp(-0.5 * d2)
    r = math.sqrt(5.0 * d2)
    return spec.amplitude * (1.0 + r + r * r / 3.0) * math.exp(-r)


def cholesky_with_jitter(K: np.ndarray, start: float = JITTER_START, max_jitter: float = JITTER_MAX):
    """Lower Cholesky factor of ``K + jitter * I``.

    The plain factorization is tried first; on failure jitter starts at
    ``start`` and grows tenfold up to ``max_jitter``. Returns ``(L, jitter)``.
    """
    n = K.shape[0]
    jitter = 0.0
    eye = np.eye(n)
    while True:
        try:
            return np.linalg.cholesky(K + jitter * eye), jitter
        except np.linalg.LinAlgError:
            if jitter == 0.0:
                jitter = start
                continue
            if jitter >= max_jitter:
                eigmin = float(np.linalg.eigvalsh(0.5 * (K + K.T)).min()) if n else float("nan")
                raise CholeskyError(
                    f"matrix of size {n} not positive definite with jitter {jitter:.1e} "
                    f"(smallest eigenvalue {eigmin:.3e})"
                ) from None
            jitter *= 10.0


@dataclass(frozen=True, eq=False)
class GpPosterior:
    """Zero-mean GP conditioned on observations ``(X, y)`` with noise variance ``noise``."""

    kernel: KernelSpec
    X: np.ndarray
    y: np.ndarray
    noise: float
    factor: np.ndarray
    alpha: np.ndarray
    jitter: float

    @property
    def num_observations(self) -> int:
        return self.X.shape[0]

    def mean_var(self, Xq) -> tuple[np.ndarray, np.ndarray]:
        """Posterior mean and variance at each row of ``Xq``."""
        Xq = np.atleast_2d(np.asarray(Xq, dtype=np.float64))
        prior_var = np.full(Xq.shape[0], self.kernel.amplitude)
        if self.num_observations == 0:
            return np.zeros(Xq.shape[0]), prior_var
        Ks = self.kernel(self.X, Xq)
        mean = Ks.T @ self.alpha
        v = solve_triangular(self.factor, Ks, lower=True, check_finite=False)
        var = prior_var - np.sum(v**2, axis=0)
        return mean, _clip_variance(var)

    def mean_cov(self, Xq) -> tuple[np.ndarray, np.ndarray]:
        """Posterior mean vector and joint covariance matrix over the rows of ``Xq``."""
        Xq = np.atleast_2d(np.asarray(Xq, dtype=np.float64))
        Kqq = self.kernel(Xq, Xq)
        if self.num_observations == 0:
            return np.zeros(Xq.shape[0]), Kqq
        Ks = self.kernel(self.X, Xq)
        v = solve_triangular(self.factor, Ks, lower=True, check_finite=False)
        cov = Kqq - v.T @ v
        return Ks.T @ self.alpha, 0.5 * (cov + cov.T)


def _clip_variance(var: np.ndarray) -> np.ndarray:
    # roundoff can push near-zero variances slightly negative
    return np.maximum(var, 0.0)


def fit(kernel: KernelSpec, X, y, noise: float = 0.0) -> GpPosterior:
    """Condition a zero-mean GP prior on observations.

    ``noise`` is the observation-noise variance. An empty training set
    returns the prior.
    """
    if noise < 0:
        raise ValueError(f"noise variance must be >= 0, got {noise}")
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        X = X.reshape(y.shape[0], -1)
    if X.shape[0] != y.shape[0]:
        raise ValueError(f"{X.shape[0]} inputs but {y.shape[0]} targets")
    if y.shape[0] == 0:
        return GpPosterior(kernel, X, y, noise, np.zeros((0, 0)), np.zeros(0), 0.0)
    K = kernel(X, X) + noise * np.eye(X.shape[0])
    L, jitter = cholesky_with_jitter(K)
    alpha = cho_solve((L, True), y, check_finite=False)
    return GpPosterior(kernel, X.copy(), y.copy(), float(noise), L, alpha, jitter)


def posterior_mean_var(model: GpPosterior, x) -> tuple[float, float]:
    """Posterior mean and variance at a single input."""
    mean, var = model.mean_var(np.atleast_1d(np.asarray(x, dtype=np.float64))[None, :])
    return float(mean[0]), float(var[0])


def sample_posterior(model: GpPosterior, candidates, rng: np.random.Generator) -> np.ndarray:
    """One joint draw of the posterior function over the rows of ``candidates``."""
    C = np.atleast_2d(np.asarray(candidates, dtype=np.float64))
    if C.shape[0] < 1:
        raise ValueError("need at least one candidate")
    mean, cov = model.mean_cov(C)
    L, _ = cholesky_with_jitter(cov)
    return mean + L @ rng.standard_normal(C.shape[0])


def information_gain(gram, noise: float) -> float:
    """Mutual information ``0.5 * log det(I + K / noise)`` between noisy observations and f."""
    if noise <= 0:
        raise ValueError(f"noise variance must be > 0, got {noise}")
    K = np.atleast_2d(np.asarray(gram, dtype=np.float64))
    if K.shape[0] != K.shape[1]:
        raise ValueError(f"gram matrix must be square, got {K.shape}")
    if K.shape[0] == 0:
        return 0.0
    sign, logdet = np.linalg.slogdet(np.eye(K.shape[0]) + K / noise)
    if sign <= 0:
        raise ValueError("I + K / noise is not positive definite; is the gram matrix PSD?")
    return 0.5 * float(logdet)
