"""``mohv`` command line.

Exit codes: 0 on success, 1 on argument errors, 2 on runtime errors.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from .harness import emit_plots, load_plan, plan_from_mapping, run_plan
from .pareto import hypervolume_exact, read_points
from .scalarization import estimate_hypervolume_mc

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2
MAX_EXACT_OBJECTIVES = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mohv", description="Hypervolume-scalarized multi-objective optimization.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run a benchmark plan")
    run.add_argument("--config", help="plan file (key = value lines)")
    run.add_argument("--out", default="results", help="output directory")
    run.add_argument("--seed", type=int, help="base seed")
    run.add_argument("--problem", help="e.g. schwefel-ellipsoid; comma-separate several")
    run.add_argument("--dim", help="input dimension(s), comma separated")
    run.add_argument("--noise", help="observation noise level(s), comma separated")
    run.add_argument("--instance", type=int, help="problem instance seed")
    run.add_argument("--algorithms", help="subset of ucb,ts,es,random")
    run.add_argument("--scalarizations", help="subset of hypervolume,linear,chebyshev")
    run.add_argument("--iterations", type=int)
    run.add_argument("--repeats", type=int)
    run.add_argument("--workers", type=int)
    run.add_argument("--timing", action="store_true", help="fill the trace 'seconds' column")

    plot = sub.add_parser("plot", help="render SVG plots from a run directory")
    plot.add_argument("--in", dest="input", required=True, help="run output directory")
    plot.add_argument("--out", help="plot directory (default: <in>/plots)")

    est = sub.add_parser("hv-estimate", help="Monte-Carlo hypervolume of a point file")
    est.add_argument("--points", required=True, help="file with one point per line")
    est.add_argument("--ref", required=True, type=_floats, help="reference point z1,...,zk")
    est.add_argument("--samples", type=int, default=100_000)
    est.add_argument("--seed", type=int, default=0)
    est.add_argument("--exact", action="store_true", help="also print the exact value (k <= 4)")
    return parser


def _cmd_run(args) -> int:
    overrides = {
        "base_seed": args.seed,
        "problems": args.problem,
        "dims": args.dim,
        "noise_levels": args.noise,
        "instance": args.instance,
        "algorithms": args.algorithms,
        "scalarizations": args.scalarizations,
        "iterations": args.iterations,
        "repeats": args.repeats,
        "workers": args.workers,
        "record_timing": True if args.timing else None,
    }
    overrides = {k: v for k, v in overrides.items() if v is not None}
    try:
        base = load_plan(args.config) if args.config else None
        plan = plan_from_mapping(overrides, base)
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    manifest = run_plan(plan, args.out)
    for cfg in manifest["configurations"]:
        print(f"{cfg['key']}\t{cfg['final_mean_hypervolume']:.4f} +- {cfg['final_stderr_hypervolume']:.4f}")
    return EXIT_OK


def _cmd_plot(args) -> int:
    for path in emit_plots(args.input, args.out):
        print(path)
    return EXIT_OK


def _cmd_estimate(args) -> int:
    try:
        Y = read_points(args.points)
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    z = np.array(args.ref)
    if Y.shape[1] != z.shape[0]:
        raise UsageError(f"points have {Y.shape[1]} objectives but --ref has {z.shape[0]}")
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    estimate = estimate_hypervolume_mc(Y, z, args.samples, np.random.default_rng(args.seed))
    print(f"estimate {estimate!r}")
    if args.exact:
        if z.shape[0] > MAX_EXACT_OBJECTIVES:
            print(f"exact skipped (k={z.shape[0]} > {MAX_EXACT_OBJECTIVES})", file=sys.stderr)
        else:
            print(f"exact {hypervolume_exact(Y, z)!r}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
        handler = {"run": _cmd_run, "plot": _cmd_plot, "hv-estimate": _cmd_estimate}[args.command]
        return handler(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - top-level boundary
        print(f"mohv: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
