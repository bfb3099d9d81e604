"""BBOB-style bi-objective test problems on ``[-5, 5]^n``.

Each raw function is non-negative and minimized. A bi-objective problem
negates and normalizes two of them so that evaluations land in the square
``[-5, 0]^2`` and hypervolume with respect to ``(-5, -5)`` is capped at 25.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

log = logging.getLogger(__name__)

DOMAIN_LOW = -5.0
DOMAIN_HIGH = 5.0
REFERENCE = np.array([-5.0, -5.0])
NUM_NORMALIZATION_POINTS = 30
FUNCTIONS = ("sphere", "ellipsoid", "schwefel", "rastrigin", "rosenbrock")
_DOMAIN_TOL = 1e-12


def _sphere(z: np.ndarray) -> float:
    return float(np.dot(z, z))


def _ellipsoid(z: np.ndarray) -> float:
    n = z.shape[0]
    exponents = 6.0 * np.arange(n) / (n - 1) if n > 1 else np.zeros(1)
    return float(np.dot(10.0**exponents, z**2))


def _schwefel(z: np.ndarray) -> float:
    # Schwefel 1.2: sum of squared prefix sums
    return float(np.sum(np.cumsum(z) ** 2))


def _rastrigin(z: np.ndarray) -> float:
    return float(10.0 * z.shape[0] + np.sum(z**2 - 10.0 * np.cos(2.0 * np.pi * z)))


def _rosenbrock(z: np.ndarray) -> float:
    # optimum at z = 1; callers shift so that it coincides with the instance shift
    return float(np.sum(100.0 * (z[1:] - z[:-1] ** 2) ** 2 + (1.0 - z[:-1]) ** 2))


_RAW = {
    "sphere": _sphere,
    "ellipsoid": _ellipsoid,
    "schwefel": _schwefel,
    "rastrigin": _rastrigin,
    "rosenbrock": _rosenbrock,
}


def _check_domain(x: np.ndarray, n: int) -> None:
    if x.shape != (n,):
        raise ValueError(f"expected input of shape ({n},), got {x.shape}")
    if np.any(x < DOMAIN_LOW - _DOMAIN_TOL) or np.any(x > DOMAIN_HIGH + _DOMAIN_TOL):
        raise ValueError(f"input outside [{DOMAIN_LOW}, {DOMAIN_HIGH}]^{n}")


@dataclass(frozen=True, eq=False)
class BenchmarkFunction:
    """A raw test function composed with ``x -> rotation @ (x - shift)``."""

    name: str
    dimension: int
    shift: np.ndarray | None = None
    rotation: np.ndarray | None = None
    normalization_scale: float | None = None

    def __post_init__(self):
        if self.name not in _RAW:
            raise ValueError(f"unknown function {self.name!r}; expected one of {FUNCTIONS}")
        n = self.dimension
        if self.shift is None:
            object.__setattr__(self, "shift", np.zeros(n))
        if self.rotation is None:
            object.__setattr__(self, "rotation", np.eye(n))
        if self.normalization_scale is None:
            object.__setattr__(self, "normalization_scale", compute_normalization(self))

    def __call__(self, x) -> float:
        return evaluate_raw(self, x)


def evaluate_raw(fn: BenchmarkFunction, x) -> float:
    """Unnormalized function value (>= 0) at an in-domain input."""
    x = np.asarray(x, dtype=np.float64)
    _check_domain(x, fn.dimension)
    z = fn.rotation @ (x - fn.shift)
    if fn.name == "rosenbrock":
        z = z + 1.0
    return _RAW[fn.name](z)


def normalization_points(n: int, bounds=None) -> np.ndarray:
    """Fixed, seed-independent low-discrepancy inputs used for normalization."""
    halton = qmc.Halton(d=n, scramble=False)
    # the first unscrambled Halton point is the origin of the unit cube; skip it
    u = halton.random(NUM_NORMALIZATION_POINTS + 1)[1:]
    if bounds is None:
        return qmc.scale(u, np.full(n, DOMAIN_LOW), np.full(n, DOMAIN_HIGH))
    bounds = np.asarray(bounds, dtype=np.float64)
    return qmc.scale(u, bounds[:, 0], bounds[:, 1])


def compute_normalization(fn, bounds=None) -> float:
    """Sample standard deviation of raw values at the fixed normalization inputs.

    ``fn`` is a ``BenchmarkFunction`` or any callable with a ``dimension``
    attribute. ``bounds`` is an ``(n, 2)`` box, ``[-5, 5]^n`` by default.
    A constant function falls back to scale 1 with a warning.
    """
    evaluate = (lambda x: evaluate_raw(fn, x)) if isinstance(fn, BenchmarkFunction) else fn
    values = [evaluate(x) for x in normalization_points(fn.dimension, bounds)]
    scale = float(np.std(values, ddof=1))
    if not np.isfinite(scale) or scale <= 0.0:
        log.warning("zero spread over normalization inputs; using scale 1")
        return 1.0
    return scale


@dataclass(frozen=True, eq=False)
class BiObjectiveProblem:
    """Maximize ``(-f1 / scale1, -f2 / scale2)`` clipped to ``[-5, 0]^2``."""

    f1: BenchmarkFunction
    f2: BenchmarkFunction
    noise_sigma: float = 0.0
    reference: np.ndarray = field(default_factory=lambda: REFERENCE.copy())

    def __post_init__(self):
        if self.f1.dimension != self.f2.dimension:
            raise ValueError("both objectives must share the input dimension")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")

    @property
    def dimension(self) -> int:
        return self.f1.dimension

    @property
    def bounds(self) -> np.ndarray:
        return np.tile([DOMAIN_LOW, DOMAIN_HIGH], (self.dimension, 1))

    def __call__(self, x, rng: np.random.Generator | None = None) -> np.ndarray:
        return evaluate_objectives(self, x, rng)


def evaluate_objectives(problem: BiObjectiveProblem, x, rng: np.random.Generator | None = None) -> np.ndarray:
    """Normalized, negated objective vector with optional Gaussian noise.

    Noise is added after normalization and before clipping to ``[-5, 0]``.
    """
    y = np.array(
        [
            -evaluate_raw(problem.f1, x) / problem.f1.normalization_scale,
            -evaluate_raw(problem.f2, x) / problem.f2.normalization_scale,
        ]
    )
    if problem.noise_sigma > 0:
        if rng is None:
            raise ValueError("a noisy problem needs a random generator")
        y = y + problem.noise_sigma * rng.standard_normal(2)
    return np.clip(y, DOMAIN_LOW, 0.0)


def random_rotation(rng: np.random.Generator, n: int) -> np.ndarray:
    """Orthogonal matrix from the QR decomposition of a Gaussian matrix."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    # sign fix makes the distribution Haar and the result unique
    return q * np.sign(np.diag(r))


def make_function(name: str, n: int, rng: np.random.Generator) -> BenchmarkFunction:
    shift = rng.uniform(-2.0, 2.0, size=n)
    rotation = random_rotation(rng, n)
    return BenchmarkFunction(name, n, shift=shift, rotation=rotation)


def make_instance(name1: str, name2: str, n: int, instance_seed: int, noise_sigma: float = 0.0) -> BiObjectiveProblem:
    """Randomly shifted and rotated bi-objective problem, fixed by ``instance_seed``.

    The two objectives get independent shifts and rotations.
    """
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    for name in (name1, name2):
        if name not in _RAW:
            raise ValueError(f"unknown function {name!r}; expected one of {FUNCTIONS}")
    rng = np.random.default_rng(instance_seed)
    return BiObjectiveProblem(make_function(name1, n, rng), make_function(name2, n, rng), noise_sigma)


def parse_problem(spec: str) -> tuple[str, str]:
    """Split ``"schwefel-ellipsoid"`` into its two function names."""
    parts = spec.strip().lower().split("-")
    if len(parts) != 2 or any(p not in _RAW for p in parts):
        raise ValueError(f"problem must look like 'sphere-ellipsoid' using {FUNCTIONS}, got {spec!r}")
    return parts[0], parts[1]
