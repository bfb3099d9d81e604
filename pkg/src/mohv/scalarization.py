"""Scalarizations of objective vectors and the Monte-Carlo hypervolume estimator.

The hypervolume scalarization is

    s_lam(y - z) = min_i max(0, (y_i - z_i) / lam_i) ** k

and for weights drawn uniformly from the positive orthant of the unit sphere,
``c_k * E[max_{y in Y} s_lam(y - z)]`` equals the dominated hypervolume of
``Y`` with respect to ``z``. Averaging over a finite sample of weights gives
an unbiased estimator whose error shrinks like ``1/sqrt(num_samples)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

WEIGHT_FLOOR = 1e-9

ScalarizationName = Literal["hypervolume", "chebyshev", "linear"]
SCALARIZATIONS: tuple[str, ...] = ("hypervolume", "chebyshev", "linear")


def _pair(lam, y):
    lam = np.asarray(lam, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if lam.shape[-1:] != y.shape[-1:]:
        raise ValueError(f"length mismatch: weights {lam.shape} vs objectives {y.shape}")
    return lam, y


def sample_weights(rng: np.random.Generator, k: int, size: int) -> np.ndarray:
    """Draw ``size`` weight vectors uniformly from the positive unit-sphere orthant.

    Each row is ``|g| / ||g||`` for an isotropic Gaussian ``g``; entries are
    floored at ``WEIGHT_FLOOR`` and renormalized so none is exactly zero.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    g = np.abs(rng.standard_normal((size, k)))
    # norm is zero only with probability zero; guard anyway
    g[np.all(g == 0.0, axis=1)] = 1.0
    lam = g / np.linalg.norm(g, axis=1, keepdims=True)
    lam = np.maximum(lam, WEIGHT_FLOOR)
    return lam / np.linalg.norm(lam, axis=1, keepdims=True)


def sample_weight(rng: np.random.Generator, k: int) -> np.ndarray:
    """One weight vector on the positive orthant of the unit sphere."""
    return sample_weights(rng, k, 1)[0]


def _clipped_power(r: np.ndarray, k: int) -> np.ndarray:
    """``max(0, r) ** k`` with an exact zero at the clip."""
    # integer power rather than exp(k log r): k = 1 stays the identity
    return np.power(np.maximum(r, 0.0), k)


def hypervolume_scalarization(lam, y, z) -> float | np.ndarray:
    """``min_i max(0, (y_i - z_i) / lam_i) ** k``.

    ``y`` may be a batch of shape ``(N, k)``; the result then has shape ``(N,)``.
    """
    lam, y = _pair(lam, y)
    z = np.asarray(z, dtype=np.float64)
    if np.any(lam <= 0):
        raise ValueError("hypervolume scalarization needs strictly positive weights")
    k = lam.shape[-1]
    ratio = np.min((y - z) / lam, axis=-1)
    out = _clipped_power(np.atleast_1d(ratio), k)
    return float(out[0]) if np.ndim(ratio) == 0 else out


def chebyshev_scalarization(lam, y, z) -> float | np.ndarray:
    """``min_i lam_i (y_i - z_i)``; may be negative."""
    lam, y = _pair(lam, y)
    out = np.min(lam * (y - np.asarray(z, dtype=np.float64)), axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def linear_scalarization(lam, y) -> float | np.ndarray:
    """``sum_i lam_i y_i``."""
    lam, y = _pair(lam, y)
    out = y @ lam
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class Scalarization:
    """A scalarization family together with its reference point.

    Calling the object applies ``s_lam`` to a single objective vector or a
    batch of them.
    """

    kind: str
    reference: np.ndarray = field(default_factory=lambda: np.zeros(1))

    def __post_init__(self):
        if self.kind not in SCALARIZATIONS:
            raise ValueError(f"unknown scalarization {self.kind!r}; expected one of {SCALARIZATIONS}")
        object.__setattr__(self, "reference", np.atleast_1d(np.asarray(self.reference, dtype=np.float64)))

    def __call__(self, lam, y):
        if self.kind == "hypervolume":
            return hypervolume_scalarization(lam, y, self.reference)
        if self.kind == "chebyshev":
            return chebyshev_scalarization(lam, y, self.reference)
        return linear_scalarization(lam, y)


def c_k(k: int) -> float:
    """Volume of the positive orthant of the unit k-ball: ``pi^(k/2) / (2^k Gamma(k/2 + 1))``.

    The gamma function at integers and half-integers is expanded exactly,
    giving ``(pi/4)^m / m!`` for ``k = 2m`` and ``(pi/2)^((k-1)/2) / k!!`` for odd ``k``.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k <= 100:
        if k % 2 == 0:
            return (math.pi / 4) ** (k // 2) / math.factorial(k // 2)
        return (math.pi / 2) ** ((k - 1) // 2) / math.prod(range(k, 0, -2))
    return math.exp(0.5 * k * math.log(math.pi) - k * math.log(2.0) - math.lgamma(0.5 * k + 1.0))


def _max_scalarized(Y: np.ndarray, z: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """``max_{y in Y} s_lam(y - z)`` for each row of ``lam``."""
    k = Y.shape[1]
    shifted = Y - z
    inv = 1.0 / lam
    # (s, m): per-weight, per-point radius along the weight direction;
    # looping over the k objectives is much faster than a 3-D reduction
    radius = inv[:, :1] * shifted[:, 0]
    for i in range(1, k):
        np.minimum(radius, inv[:, i : i + 1] * shifted[:, i], out=radius)
    # the power is monotone, so take it after the max
    return _clipped_power(radius.max(axis=1), k)


def estimate_hypervolume_mc(
    points,
    z,
    num_samples: int,
    rng: np.random.Generator,
    chunk_size: int = 20_000,
    return_stderr: bool = False,
):
    """Monte-Carlo hypervolume estimate ``c_k * mean_j max_y s_{lam_j}(y - z)``.

    Weights are drawn in chunks to bound memory; chunking does not change
    the sample stream. With ``return_stderr`` the standard error of the
    estimate is returned as a second value.
    """
    Y = np.asarray(points, dtype=np.float64)
    z = np.atleast_1d(np.asarray(z, dtype=np.float64))
    if Y.ndim == 1:
        Y = Y.reshape(-1, 1) if z.shape[0] == 1 else Y.reshape(1, -1)
    if Y.shape[0] == 0:
        raise ValueError("cannot estimate the hypervolume of an empty set")
    if Y.shape[1] != z.shape[0]:
        raise ValueError(f"points have {Y.shape[1]} objectives, reference has {z.shape[0]}")
    if num_samples < 1:
        raise ValueError(f"num_samples must be >= 1, got {num_samples}")
    k = z.shape[0]
    lam = sample_weights(rng, k, num_samples)
    total = 0.0
    total_sq = 0.0
    for start in range(0, num_samples, chunk_size):
        vals = _max_scalarized(Y, z, lam[start : start + chunk_size])
        total += vals.sum()
        total_sq += np.square(vals).sum()
    ck = c_k(k)
    mean = total / num_samples
    estimate = ck * mean
    if not return_stderr:
        return float(estimate)
    var = max(total_sq / num_samples - mean**2, 0.0)
    stderr = ck * math.sqrt(var * num_samples / max(num_samples - 1, 1) / num_samples)
    return float(estimate), float(stderr)


def required_samples(B: float, k: int, eps: float, delta: float) -> int:
    """Number of weights needed for the mean scalarization to be ``eps``-accurate.

    Points must satisfy ``y <= z + B``. The mean of ``max_y s_lam(y - z)``
    lands within ``eps`` of ``HV / c_k`` with probability ``1 - delta`` once
    ``s >= B^(2k) k^k ln(2/delta) / (2 eps^2)`` (two-sided Hoeffding on
    values in ``[0, B^k k^(k/2)]``).
    """
    if B < 1:
        raise ValueError(f"B must be >= 1, got {B}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if eps <= 0:
        raise ValueError(f"eps must be > 0, got {eps}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    return math.ceil(B ** (2 * k) * k**k * math.log(2.0 / delta) / (2.0 * eps**2))
