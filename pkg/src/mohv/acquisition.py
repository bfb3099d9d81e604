"""Per-objective acquisition values for UCB and Thompson sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .gp import GpPosterior, sample_posterior

DEFAULT_BETA_SQRT = 1.8


@dataclass(frozen=True)
class AcquisitionSpec:
    """Acquisition configuration.

    Attributes:
        kind: ``"ucb"`` or ``"thompson"``.
        beta_sqrt: UCB standard-deviation multiplier.
        candidate_count: size of the candidate batch a Thompson draw is made over.
        beta_schedule: if True, UCB uses ``sqrt(n * ln(t + 1))`` at step ``t``
            instead of the constant ``beta_sqrt``.
    """

    kind: Literal["ucb", "thompson"] = "ucb"
    beta_sqrt: float = DEFAULT_BETA_SQRT
    candidate_count: int = 512
    beta_schedule: bool = False

    def __post_init__(self):
        if self.kind not in ("ucb", "thompson"):
            raise ValueError(f"unknown acquisition {self.kind!r}")
        if self.beta_sqrt < 0:
            raise ValueError("beta_sqrt must be >= 0")
        if self.candidate_count < 1:
            raise ValueError("candidate_count must be >= 1")

    def beta_sqrt_at(self, step: int, dim: int) -> float:
        if not self.beta_schedule:
            return self.beta_sqrt
        return math.sqrt(dim * math.log(step + 1))


def ucb_value(model: GpPosterior, x, beta_sqrt: float) -> float:
    """``mu(x) + beta_sqrt * sd(x)`` at a single input."""
    return float(ucb_batch(model, np.atleast_1d(np.asarray(x, dtype=np.float64))[None, :], beta_sqrt)[0])


def ucb_batch(model: GpPosterior, X, beta_sqrt: float) -> np.ndarray:
    mean, var = model.mean_var(X)
    return mean + beta_sqrt * np.sqrt(var)


def acquisition_vector(
    models: Sequence[GpPosterior],
    x_batch,
    spec: AcquisitionSpec,
    rng: np.random.Generator | None = None,
    beta_sqrt: float | None = None,
) -> np.ndarray:
    """Acquisition matrix of shape ``(N, k)``; column ``j`` depends on ``models[j]`` only.

    For Thompson sampling each column is a single joint function draw over
    the whole batch, so repeated candidates receive coherent values.
    """
    X = np.atleast_2d(np.asarray(x_batch, dtype=np.float64))
    if spec.kind == "ucb":
        b = spec.beta_sqrt if beta_sqrt is None else beta_sqrt
        cols = [ucb_batch(m, X, b) for m in models]
    else:
        if rng is None:
            raise ValueError("Thompson sampling needs a random generator")
        cols = [sample_posterior(m, X, rng) for m in models]
    return np.column_stack(cols) if cols else np.zeros((X.shape[0], 0))
