"""Benchmark driver: runs a problem x dimension x algorithm x scalarization matrix.

Outputs, under one directory:

    traces/<config>_r<repeat>.csv   one trace per run
    summaries/<config>.csv          per-step mean / standard error over repeats
    manifest.json                   plan, seeds, versions, timings, file hashes
    plots/*.svg                     written by ``emit_plots``
"""

from __future__ import annotations

import configparser
import dataclasses
import hashlib
import json
import logging
import platform
import tempfile
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy

from . import __version__, svg
from .acquisition import AcquisitionSpec
from .benchmarks import make_instance, parse_problem
from .optimizer import (
    EvolutionStrategy,
    OptimizerConfig,
    TraceRecord,
    read_trace_csv,
    run_random_search,
    run_scalarized_general,
    run_scalarized_mobo,
    write_trace_csv,
)
from .scalarization import SCALARIZATIONS

log = logging.getLogger(__name__)

ALGORITHMS = ("ucb", "ts", "es", "random")
MANIFEST = "manifest.json"


@dataclass
class ExperimentPlan:
    problems: list[str] = field(default_factory=lambda: ["sphere-ellipsoid", "schwefel-ellipsoid"])
    dims: list[int] = field(default_factory=lambda: [8])
    algorithms: list[str] = field(default_factory=lambda: ["ucb", "es", "random"])
    scalarizations: list[str] = field(default_factory=lambda: ["hypervolume", "linear"])
    iterations: int = 70
    repeats: int = 5
    base_seed: int = 0
    noise_levels: list[float] = field(default_factory=lambda: [0.0])
    instance: int = 0
    beta_sqrt: float = 1.8
    inner_budget: int = 512
    workers: int = 1
    record_timing: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self):
        for name in ("problems", "dims", "algorithms", "scalarizations", "noise_levels"):
            if not getattr(self, name):
                raise ValueError(f"{name} must not be empty")
        for p in self.problems:
            parse_problem(p)
        for d in self.dims:
            if d < 2:
                raise ValueError(f"dimension must be >= 2, got {d}")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {a!r}; expected one of {ALGORITHMS}")
        for s in self.scalarizations:
            if s not in SCALARIZATIONS:
                raise ValueError(f"unknown scalarization {s!r}; expected one of {SCALARIZATIONS}")
        if any(s < 0 for s in self.noise_levels):
            raise ValueError("noise levels must be >= 0")
        if self.iterations < 1 or self.repeats < 1 or self.workers < 1 or self.inner_budget < 1:
            raise ValueError("iterations, repeats, workers and inner_budget must be >= 1")

    def configurations(self) -> list[RunConfig]:
        """Every distinct configuration; random search ignores the scalarization."""
        out = []
        for problem in self.problems:
            for dim in self.dims:
                for noise in self.noise_levels:
                    for algorithm in self.algorithms:
                        scals = [None] if algorithm == "random" else self.scalarizations
                        for scal in scals:
                            out.append(RunConfig(problem, dim, algorithm, scal, noise))
        return out


@dataclass(frozen=True)
class RunConfig:
    problem: str
    dim: int
    algorithm: str
    scalarization: str | None
    noise: float

    @property
    def group(self) -> str:
        """Configurations sharing a group are plotted together."""
        return f"{self.problem}_n{self.dim}_noise{self.noise:g}"

    @property
    def label(self) -> str:
        return self.algorithm if self.scalarization is None else f"{self.algorithm}-{self.scalarization}"

    @property
    def key(self) -> str:
        return f"{self.group}_{self.label}"


def run_seed(config: RunConfig, base_seed: int, repeat: int) -> int:
    """Configuration hash XOR (base seed + repeat index)."""
    return zlib.crc32(config.key.encode()) ^ (base_seed + repeat)


# ---------------------------------------------------------------------------
# plan files
# ---------------------------------------------------------------------------

_LIST_FIELDS = {"problems": str, "dims": int, "algorithms": str, "scalarizations": str, "noise_levels": float}
_ALIASES = {"problem": "problems", "dim": "dims", "noise": "noise_levels", "seed": "base_seed", "T": "iterations"}


def _coerce(name: str, raw) -> object:
    fields = {f.name: f for f in dataclasses.fields(ExperimentPlan)}
    if name not in fields:
        raise ValueError(f"unknown plan key {name!r}")
    if name in _LIST_FIELDS:
        items = raw if isinstance(raw, (list, tuple)) else [s for s in str(raw).replace(" ", "").split(",") if s]
        return [_LIST_FIELDS[name](v) for v in items]
    default = getattr(ExperimentPlan(), name)
    if isinstance(default, bool):
        if isinstance(raw, bool):
            return raw
        if str(raw).lower() in ("1", "true", "yes", "on"):
            return True
        if str(raw).lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"{name}: not a boolean: {raw!r}")
    return type(default)(raw)


def plan_from_mapping(values: dict, base: ExperimentPlan | None = None) -> ExperimentPlan:
    """Overlay ``values`` on ``base`` (or the defaults). Keys may use CLI aliases."""
    data = dataclasses.asdict(base or ExperimentPlan())
    for key, raw in values.items():
        name = _ALIASES.get(key, key)
        try:
            data[name] = _coerce(name, raw)
        except (TypeError, ValueError) as exc:
            raise ValueError(f"plan key {key!r}: {exc}") from None
    return ExperimentPlan(**data)


def load_plan(path) -> ExperimentPlan:
    """Read a flat ``key = value`` plan file; lists are comma separated, ``#`` starts a comment."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), delimiters=("=", ":"))
    parser.optionxform = str
    text = Path(path).read_text()
    try:
        parser.read_string("[plan]\n" + text, source=str(path))
    except configparser.Error as exc:
        raise ValueError(f"{path}: {exc}") from None
    return plan_from_mapping(dict(parser["plan"]))


# ---------------------------------------------------------------------------
# running
# ---------------------------------------------------------------------------


def execute_run(config: RunConfig, seed: int, plan: ExperimentPlan) -> list[TraceRecord]:
    """One optimization run; pure function of its arguments."""
    name1, name2 = parse_problem(config.problem)
    problem = make_instance(name1, name2, config.dim, plan.instance, noise_sigma=config.noise)
    noise_rng = np.random.default_rng([seed, 1])

    def F(x):
        return problem(x, noise_rng)

    z = problem.reference
    if config.algorithm in ("ucb", "ts"):
        acq = AcquisitionSpec(
            kind="ucb" if config.algorithm == "ucb" else "thompson",
            beta_sqrt=plan.beta_sqrt,
            candidate_count=plan.inner_budget,
        )
        opt = OptimizerConfig(
            bounds=problem.bounds,
            iterations=plan.iterations,
            scalarization=config.scalarization,
            acquisition=acq,
            inner_budget=plan.inner_budget,
            # observation noise variance for the GP when the problem is noisy
            gp_noise=max(config.noise**2, 1e-6),
            seed=seed,
        )
        return run_scalarized_mobo(F, opt, z)
    rng = np.random.default_rng(seed)
    if config.algorithm == "es":
        # one ES step per scalarization, l = iterations, sharing an incumbent pool
        es = EvolutionStrategy(shared_pool=True)
        return run_scalarized_general(F, es, plan.iterations, 1, config.scalarization, z, rng, problem.bounds)
    return run_random_search(F, problem.bounds, plan.iterations, rng, z)


def _run_job(args):
    config, repeat, seed, plan, trace_path = args
    start = time.perf_counter()
    records = execute_run(config, seed, plan)
    write_trace_csv(records, trace_path, include_timing=plan.record_timing)
    return {
        "config": config.key,
        "repeat": repeat,
        "seed": seed,
        "trace": trace_path.name,
        "final_hypervolume": records[-1].hypervolume,
        "seconds": time.perf_counter() - start,
    }


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _check_writable(output_dir: Path) -> None:
    output_dir.mkdir(parents=True, exist_ok=True)
    with tempfile.NamedTemporaryFile(dir=output_dir):
        pass


def summarize(hypervolumes: np.ndarray) -> dict[str, np.ndarray]:
    """Per-step statistics over a ``(repeats, steps)`` hypervolume array."""
    R = hypervolumes.shape[0]
    mean = hypervolumes.mean(axis=0)
    if R > 1:
        stderr = hypervolumes.std(axis=0, ddof=1) / np.sqrt(R)
    else:
        stderr = np.zeros_like(mean)
    return {"mean": mean, "stderr": stderr, "min": hypervolumes.min(axis=0), "max": hypervolumes.max(axis=0)}


def write_summary_csv(stats: dict[str, np.ndarray], path: Path) -> None:
    lines = ["step,mean_hypervolume,stderr_hypervolume,min_hypervolume,max_hypervolume"]
    for t in range(stats["mean"].shape[0]):
        row = [stats[c][t] for c in ("mean", "stderr", "min", "max")]
        lines.append(",".join([str(t + 1)] + [repr(float(v)) for v in row]))
    path.write_text("\n".join(lines) + "\n")


def read_summary_csv(path) -> dict[str, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {"step": data[:, 0].astype(int), "mean": data[:, 1], "stderr": data[:, 2], "min": data[:, 3], "max": data[:, 4]}


def run_plan(plan: ExperimentPlan, output_dir) -> dict:
    """Execute every (configuration, repeat) of ``plan`` and write all outputs.

    Returns the manifest dictionary, also written to ``manifest.json``.
    Traces depend only on the plan and its base seed, so reruns reproduce
    them byte for byte.
    """
    plan.validate()
    output_dir = Path(output_dir)
    _check_writable(output_dir)
    traces_dir = output_dir / "traces"
    summaries_dir = output_dir / "summaries"
    traces_dir.mkdir(exist_ok=True)
    summaries_dir.mkdir(exist_ok=True)

    configs = plan.configurations()
    jobs = []
    for config in configs:
        for repeat in range(plan.repeats):
            seed = run_seed(config, plan.base_seed, repeat)
            jobs.append((config, repeat, seed, plan, traces_dir / f"{config.key}_r{repeat}.csv"))

    start = time.perf_counter()
    if plan.workers > 1:
        with ProcessPoolExecutor(max_workers=plan.workers) as pool:
            runs = list(pool.map(_run_job, jobs))
    else:
        runs = []
        for job in jobs:
            runs.append(_run_job(job))
            log.info("%s r%d final hypervolume %.4f", job[0].key, job[1], runs[-1]["final_hypervolume"])

    configurations = []
    for config in configs:
        hv = np.array(
            [read_trace_csv(traces_dir / f"{config.key}_r{r}.csv")["hypervolume"] for r in range(plan.repeats)]
        )
        stats = summarize(hv)
        summary_path = summaries_dir / f"{config.key}.csv"
        write_summary_csv(stats, summary_path)
        configurations.append(
            {
                **dataclasses.asdict(config),
                "key": config.key,
                "group": config.group,
                "label": config.label,
                "summary": f"summaries/{summary_path.name}",
                "traces": [f"traces/{config.key}_r{r}.csv" for r in range(plan.repeats)],
                "final_mean_hypervolume": float(stats["mean"][-1]),
                "final_stderr_hypervolume": float(stats["stderr"][-1]),
            }
        )

    manifest = {
        "plan": dataclasses.asdict(plan),
        "versions": {
            "mohv": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
        "configurations": configurations,
        "runs": runs,
        "total_seconds": time.perf_counter() - start,
        "files": {},
    }
    _write_manifest(output_dir, manifest)
    return manifest


def _write_manifest(output_dir: Path, manifest: dict) -> None:
    files = {}
    for sub in ("traces", "summaries", "plots"):
        d = output_dir / sub
        if d.is_dir():
            for p in sorted(d.iterdir()):
                files[f"{sub}/{p.name}"] = _sha256(p)
    manifest["files"] = files
    (output_dir / MANIFEST).write_text(json.dumps(manifest, indent=2) + "\n")


def load_manifest(input_dir) -> dict:
    path = Path(input_dir) / MANIFEST
    if not path.is_file():
        raise FileNotFoundError(f"manifest not found: {path}")
    return json.loads(path.read_text())


# ---------------------------------------------------------------------------
# plots
# ---------------------------------------------------------------------------


def emit_plots(input_dir, output_dir=None) -> list[Path]:
    """Write one hypervolume-curve SVG and one Pareto-scatter SVG per problem group.

    Reads the manifest and the summary/trace files it lists. Plots go to
    ``<input_dir>/plots`` unless ``output_dir`` is given; the manifest file
    table is refreshed when plots land in the run directory.
    """
    input_dir = Path(input_dir)
    manifest = load_manifest(input_dir)
    configurations = manifest.get("configurations", [])
    if not configurations:
        return []
    out = Path(output_dir) if output_dir is not None else input_dir / "plots"
    out.mkdir(parents=True, exist_ok=True)

    groups: dict[str, list[dict]] = {}
    for cfg in configurations:
        groups.setdefault(cfg["group"], []).append(cfg)

    written = []
    for group, cfgs in sorted(groups.items()):
        curves, scatter = [], []
        for cfg in cfgs:
            summary_path = input_dir / cfg["summary"]
            if not summary_path.is_file():
                raise FileNotFoundError(f"summary not found: {summary_path}")
            s = read_summary_csv(summary_path)
            curves.append((cfg["label"], s["step"], s["mean"], s["stderr"]))
            points = []
            for rel in cfg["traces"]:
                trace_path = input_dir / rel
                if not trace_path.is_file():
                    raise FileNotFoundError(f"trace not found: {trace_path}")
                points.append(read_trace_csv(trace_path)["y"])
            scatter.append((cfg["label"], np.vstack(points)))
        hv_path = out / f"hypervolume_{group}.svg"
        hv_path.write_text(svg.curve_plot(curves, title=f"Dominated hypervolume: {group}"))
        pareto_path = out / f"pareto_{group}.svg"
        pareto_path.write_text(svg.scatter_plot(scatter, title=f"Evaluated objectives: {group}"))
        written += [hv_path, pareto_path]

    if out.resolve() == (input_dir / "plots").resolve():
        _write_manifest(input_dir, manifest)
    return written
