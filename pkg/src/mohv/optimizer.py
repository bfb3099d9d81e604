"""Scalarized multi-objective optimizers and their baselines.

``run_scalarized_mobo`` draws a fresh random weight each step, maximizes
the scalarized per-objective acquisition vector and updates one independent
GP per objective. ``run_scalarized_general`` turns any single-objective
maximizer into a multi-objective one by running it on ``l`` randomly
scalarized problems and taking the union of the visited inputs.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from typing import Callable, Protocol, Sequence

import numpy as np
from scipy.stats import qmc

from . import gp
from .acquisition import AcquisitionSpec, acquisition_vector
from .pareto import ParetoArchive
from .scalarization import Scalarization, sample_weight

BlackBox = Callable[[np.ndarray], np.ndarray]


class StepError(RuntimeError):
    """A black-box or inner-optimizer failure, tagged with the step that raised it."""

    def __init__(self, step: int, cause: BaseException):
        super().__init__(f"step {step} failed: {cause!r}")
        self.step = step


@dataclass
class TraceRecord:
    step: int
    weight: np.ndarray | None
    x: np.ndarray
    y: np.ndarray
    hypervolume: float
    seconds: float = 0.0


@dataclass(frozen=True)
class OptimizerConfig:
    """Settings for one scalarized Bayesian-optimization run.

    Inputs are mapped from ``bounds`` to the unit cube before they reach the
    GP, so ``kernel.lengthscale`` is in unit-cube units. Targets are centered
    on the running mean of each objective before fitting.
    """

    bounds: np.ndarray
    iterations: int = 70
    scalarization: str = "hypervolume"
    acquisition: AcquisitionSpec = field(default_factory=AcquisitionSpec)
    inner_budget: int = 512
    refine_rounds: int = 5
    kernel: gp.KernelSpec = field(default_factory=gp.KernelSpec)
    gp_noise: float = 1e-6
    center_targets: bool = True
    seed: int = 0

    def __post_init__(self):
        b = _check_bounds(self.bounds)
        object.__setattr__(self, "bounds", b)
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.inner_budget < 1:
            raise ValueError("inner_budget must be >= 1")


def _check_bounds(bounds) -> np.ndarray:
    b = np.atleast_2d(np.asarray(bounds, dtype=np.float64))
    if b.ndim != 2 or b.shape[1] != 2:
        raise ValueError(f"bounds must have shape (n, 2), got {b.shape}")
    if not np.all(np.isfinite(b)) or np.any(b[:, 0] >= b[:, 1]):
        raise ValueError("bounds must be finite with lower < upper on every axis")
    return b


class SingleObjectiveAlgorithm(Protocol):
    def optimize(
        self, g: Callable[[np.ndarray], float], bounds: np.ndarray, T: int, rng: np.random.Generator
    ) -> list[np.ndarray]:
        """Maximize ``g`` over the box; return exactly ``T`` evaluated inputs."""
        ...


# ---------------------------------------------------------------------------
# inner maximizer
# ---------------------------------------------------------------------------


def quasi_random_candidates(bounds: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
    """Scrambled Sobol points scaled to the box."""
    n = bounds.shape[0]
    sobol = qmc.Sobol(d=n, scramble=True, seed=rng)
    m = int(np.ceil(np.log2(max(count, 1))))
    u = sobol.random_base2(m)[:count]
    return qmc.scale(u, bounds[:, 0], bounds[:, 1])


def maximize_batch(
    objective: Callable[[np.ndarray], np.ndarray],
    bounds: np.ndarray,
    budget: int,
    rng: np.random.Generator,
    refine_rounds: int = 5,
    initial_step: float = 0.1,
) -> tuple[np.ndarray, float]:
    """Derivative-free maximization of a batch-evaluated objective.

    Evaluates ``budget`` quasi-random candidates, then runs ``refine_rounds``
    rounds of compass search from the best one: each round tries
    ``+-step`` along every axis (``2n`` evaluations), moves to the best trial
    if it strictly improves, and halves the step. Ties go to the lowest
    candidate index.
    """
    bounds = _check_bounds(bounds)
    width = bounds[:, 1] - bounds[:, 0]
    X = quasi_random_candidates(bounds, budget, rng)
    values = np.asarray(objective(X), dtype=np.float64)
    best = int(np.argmax(values))
    x, v = X[best].copy(), float(values[best])
    step = initial_step
    n = bounds.shape[0]
    directions = np.vstack([np.eye(n), -np.eye(n)])
    for _ in range(refine_rounds):
        trials = np.clip(x + step * width * directions, bounds[:, 0], bounds[:, 1])
        tv = np.asarray(objective(trials), dtype=np.float64)
        j = int(np.argmax(tv))
        if tv[j] > v:
            x, v = trials[j].copy(), float(tv[j])
        step *= 0.5
    return x, v


def maximize_scalarized_acquisition(
    models: Sequence[gp.GpPosterior],
    weight: np.ndarray,
    scalarization: Scalarization,
    acquisition: AcquisitionSpec,
    bounds: np.ndarray,
    inner_budget: int,
    rng: np.random.Generator,
    refine_rounds: int = 5,
    beta_sqrt: float | None = None,
    target_offset: np.ndarray | None = None,
) -> np.ndarray:
    """Approximate ``argmax_x s_weight(A(x))`` over the box.

    ``target_offset`` is added back to every acquisition column, for models
    fitted on centered targets. Thompson sampling draws one joint sample
    over the candidate batch and skips compass refinement, since new points
    would fall outside that sample's support.
    """
    offset = np.zeros(len(models)) if target_offset is None else np.asarray(target_offset)

    if acquisition.kind == "thompson":
        bounds = _check_bounds(bounds)
        X = quasi_random_candidates(bounds, inner_budget, rng)
        A = acquisition_vector(models, X, acquisition, rng) + offset
        return X[int(np.argmax(scalarization(weight, A)))].copy()

    def objective(X):
        A = acquisition_vector(models, X, acquisition, beta_sqrt=beta_sqrt) + offset
        return scalarization(weight, A)

    x, _ = maximize_batch(objective, bounds, inner_budget, rng, refine_rounds)
    return x


# ---------------------------------------------------------------------------
# Algorithm: scalarized multi-objective Bayesian optimization
# ---------------------------------------------------------------------------


def _evaluate(F: BlackBox, x: np.ndarray, step: int) -> np.ndarray:
    try:
        y = np.atleast_1d(np.asarray(F(x), dtype=np.float64))
    except Exception as exc:
        raise StepError(step, exc) from exc
    if not np.all(np.isfinite(y)):
        raise StepError(step, ValueError(f"non-finite objectives {y}"))
    return y


def fit_models(config: OptimizerConfig, U: np.ndarray, Y: np.ndarray) -> tuple[list[gp.GpPosterior], np.ndarray]:
    """One independent GP per objective column; returns the models and target offsets."""
    k = Y.shape[1]
    if config.center_targets and Y.shape[0]:
        offset = Y.mean(axis=0)
    else:
        offset = np.zeros(k)
    models = [gp.fit(config.kernel, U, Y[:, j] - offset[j], config.gp_noise) for j in range(k)]
    return models, offset


def run_scalarized_mobo(F: BlackBox, config: OptimizerConfig, z, num_objectives: int | None = None) -> list[TraceRecord]:
    """Scalarized multi-objective Bayesian optimization.

    Each step draws a weight, maximizes the scalarized acquisition vector
    under GPs conditioned on all previous observations, and evaluates ``F``
    once. Deterministic given ``config.seed``.
    """
    z = np.atleast_1d(np.asarray(z, dtype=np.float64))
    k = num_objectives or z.shape[0]
    rng = np.random.default_rng(config.seed)
    bounds = config.bounds
    lo, width = bounds[:, 0], bounds[:, 1] - bounds[:, 0]
    n = bounds.shape[0]
    unit = np.tile([0.0, 1.0], (n, 1))
    scal = Scalarization(config.scalarization, z)
    archive = ParetoArchive()
    U = np.zeros((0, n))
    Y = np.zeros((0, k))
    records: list[TraceRecord] = []
    start = time.perf_counter()
    for t in range(1, config.iterations + 1):
        weight = sample_weight(rng, k)
        models, offset = fit_models(config, U, Y)
        u = maximize_scalarized_acquisition(
            models,
            weight,
            scal,
            config.acquisition,
            unit,
            config.inner_budget,
            rng,
            refine_rounds=config.refine_rounds,
            beta_sqrt=config.acquisition.beta_sqrt_at(t, n),
            target_offset=offset,
        )
        x = np.clip(lo + u * width, bounds[:, 0], bounds[:, 1])
        y = _evaluate(F, x, t)
        if y.shape[0] != k:
            raise StepError(t, ValueError(f"expected {k} objectives, got {y.shape[0]}"))
        U = np.vstack([U, (x - lo) / width])
        Y = np.vstack([Y, y])
        archive.add(x, y)
        records.append(TraceRecord(t, weight, x, y, archive.hypervolume(z), time.perf_counter() - start))
    return records


# ---------------------------------------------------------------------------
# Algorithm: scalarization around a generic single-objective optimizer
# ---------------------------------------------------------------------------


class _MemoizedBlackBox:
    """Caches ``F`` by exact input bytes so re-scoring known inputs costs nothing."""

    def __init__(self, F: BlackBox):
        self.F = F
        self.cache: dict[bytes, np.ndarray] = {}

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        key = x.tobytes()
        if key not in self.cache:
            self.cache[key] = np.atleast_1d(np.asarray(self.F(x), dtype=np.float64))
        return self.cache[key]


def run_scalarized_general(
    F: BlackBox,
    algorithm: SingleObjectiveAlgorithm,
    l: int,
    T: int,
    scalarization: str | Scalarization,
    z,
    rng: np.random.Generator,
    bounds,
) -> list[TraceRecord]:
    """Run ``algorithm`` for ``T`` iterations on each of ``l`` random scalarizations of ``F``.

    All ``l`` weights are drawn from ``rng`` before any optimization, so
    they are exactly the first ``l`` weight draws of the stream. Returns
    ``l * T`` records in visiting order; the hypervolume column covers every
    point returned so far. ``F`` is memoized, so an algorithm may re-score
    inputs it already returned without new evaluations.
    """
    if l < 1 or T < 1:
        raise ValueError("l and T must be >= 1")
    z = np.atleast_1d(np.asarray(z, dtype=np.float64))
    bounds = _check_bounds(bounds)
    scal = scalarization if isinstance(scalarization, Scalarization) else Scalarization(scalarization, z)
    k = z.shape[0]
    weights = [sample_weight(rng, k) for _ in range(l)]
    memo = _MemoizedBlackBox(F)
    archive = ParetoArchive()
    records: list[TraceRecord] = []
    start = time.perf_counter()
    for i, weight in enumerate(weights, start=1):

        def g(x, weight=weight):
            return float(scal(weight, memo(x)))

        try:
            xs = algorithm.optimize(g, bounds, T, rng)
        except Exception as exc:
            raise StepError(i, exc) from exc
        if len(xs) != T:
            raise StepError(i, ValueError(f"algorithm returned {len(xs)} points, expected {T}"))
        for x in xs:
            x = np.asarray(x, dtype=np.float64)
            try:
                y = memo(x)
            except Exception as exc:
                raise StepError(i, exc) from exc
            archive.add(x, y)
            records.append(
                TraceRecord(len(records) + 1, weight, x, y, archive.hypervolume(z), time.perf_counter() - start)
            )
    return records


class FiniteArgmax:
    """Exact maximizer over a fixed candidate set; every call returns the argmax ``T`` times.

    Ties go to the lowest candidate index.
    """

    def __init__(self, candidates):
        self.candidates = np.atleast_2d(np.asarray(candidates, dtype=np.float64))

    def optimize(self, g, bounds, T, rng):
        values = np.array([g(x) for x in self.candidates])
        best = self.candidates[int(np.argmax(values))]
        return [best.copy() for _ in range(T)]


# ---------------------------------------------------------------------------
# evolutionary strategy and random search baselines
# ---------------------------------------------------------------------------


class EvolutionStrategy:
    """Two-phase (1+1) strategy: heavy-tailed global jumps plus local Gaussian steps.

    With probability ``global_prob`` a proposal is a Cauchy jump from the
    incumbent with scale ``global_scale`` times the domain width; otherwise it
    is a Gaussian perturbation with scale ``local_scale`` times the width.
    ``local_scale`` halves after ``patience`` consecutive non-improving
    proposals. Proposals are clipped to the box.

    With ``shared_pool=True`` the strategy remembers every input it has
    returned across calls and starts each call from the best of them under
    the new objective; the step size also persists. This is the mode used
    for one-step-per-scalarization runs, and it assumes ``g`` is cheap to
    re-query on known inputs.
    """

    def __init__(
        self,
        global_prob: float = 0.2,
        local_scale: float = 0.05,
        global_scale: float = 0.1,
        patience: int | None = None,
        shared_pool: bool = False,
        min_scale: float = 1e-6,
    ):
        self.global_prob = global_prob
        self.initial_scale = local_scale
        self.global_scale = global_scale
        self.patience = patience
        self.shared_pool = shared_pool
        self.min_scale = min_scale
        self.reset()

    def reset(self):
        self.pool: list[np.ndarray] = []
        self.local_scale = self.initial_scale
        self.failures = 0
        self.incumbent_history: list[float] = []

    def _propose(self, x_best, bounds, rng):
        width = bounds[:, 1] - bounds[:, 0]
        n = bounds.shape[0]
        if rng.random() < self.global_prob:
            step = self.global_scale * width * rng.standard_cauchy(n)
        else:
            step = self.local_scale * width * rng.standard_normal(n)
        return np.clip(x_best + step, bounds[:, 0], bounds[:, 1])

    def optimize(self, g, bounds, T, rng) -> list[np.ndarray]:
        bounds = _check_bounds(bounds)
        if T < 1:
            raise ValueError("T must be >= 1")
        if not self.shared_pool:
            self.reset()
        patience = self.patience or 2 * bounds.shape[0]
        visited: list[np.ndarray] = []
        x_best, v_best = None, -np.inf
        for x in self.pool:
            v = g(x)
            if v > v_best:
                x_best, v_best = x, v
        for _ in range(T):
            if x_best is None:
                x = rng.uniform(bounds[:, 0], bounds[:, 1])
            else:
                x = self._propose(x_best, bounds, rng)
            v = g(x)
            visited.append(x)
            self.pool.append(x)
            if x_best is None or v > v_best:
                x_best, v_best = x, v
                self.failures = 0
            else:
                self.failures += 1
                if self.failures >= patience:
                    self.local_scale = max(0.5 * self.local_scale, self.min_scale)
                    self.failures = 0
            self.incumbent_history.append(v_best)
        return visited


def run_evolution_strategy(g, bounds, T: int, rng: np.random.Generator, **kwargs) -> list[np.ndarray]:
    """Maximize ``g`` with a fresh ``EvolutionStrategy``; returns the ``T`` visited inputs."""
    return EvolutionStrategy(**kwargs).optimize(g, bounds, T, rng)


def run_random_search(F: BlackBox, bounds, T: int, rng: np.random.Generator, z) -> list[TraceRecord]:
    """Uniform random search over the box with a running hypervolume trace."""
    bounds = _check_bounds(bounds)
    if T < 1:
        raise ValueError("T must be >= 1")
    z = np.atleast_1d(np.asarray(z, dtype=np.float64))
    archive = ParetoArchive()
    records = []
    start = time.perf_counter()
    for t in range(1, T + 1):
        x = rng.uniform(bounds[:, 0], bounds[:, 1])
        y = _evaluate(F, x, t)
        archive.add(x, y)
        records.append(TraceRecord(t, None, x, y, archive.hypervolume(z), time.perf_counter() - start))
    return records


# ---------------------------------------------------------------------------
# trace files
# ---------------------------------------------------------------------------


def _fmt(v: float) -> str:
    return repr(float(v))


def trace_header(k: int, n: int) -> list[str]:
    return (
        ["step"]
        + [f"lambda{j + 1}" for j in range(k)]
        + [f"x{i + 1}" for i in range(n)]
        + [f"y{j + 1}" for j in range(k)]
        + ["hypervolume", "seconds"]
    )


def write_trace_csv(records: Sequence[TraceRecord], path, include_timing: bool = False) -> None:
    """Write one row per step.

    The ``seconds`` column is left empty unless ``include_timing`` is set,
    which keeps trace files byte-identical across reruns.
    """
    if not records:
        raise ValueError("no records to write")
    k = records[0].y.shape[0]
    n = records[0].x.shape[0]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(trace_header(k, n))
        for r in records:
            weight = [""] * k if r.weight is None else [_fmt(v) for v in r.weight]
            writer.writerow(
                [str(r.step)]
                + weight
                + [_fmt(v) for v in r.x]
                + [_fmt(v) for v in r.y]
                + [_fmt(r.hypervolume), _fmt(r.seconds) if include_timing else ""]
            )


def read_trace_csv(path) -> dict[str, np.ndarray]:
    """Load a trace file into arrays: ``step``, ``weight``, ``x``, ``y``, ``hypervolume``."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]

    def cols(prefix):
        idx = [i for i, h in enumerate(header) if h.startswith(prefix) and h[len(prefix) :].isdigit()]
        return np.array([[float(r[i]) if r[i] else np.nan for i in idx] for r in body])

    hv = header.index("hypervolume")
    return {
        "step": np.array([int(r[0]) for r in body]),
        "weight": cols("lambda"),
        "x": cols("x"),
        "y": cols("y"),
        "hypervolume": np.array([float(r[hv]) for r in body]),
    }

