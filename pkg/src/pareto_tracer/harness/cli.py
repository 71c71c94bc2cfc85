"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys

from ..core import validate_problem
from ..hvp import HvpMode
from ..krylov import Solver
from ..problems import PROBLEM_NAMES, UnsupportedFront, analytic_front
from . import export
from .config import ConfigError, ProblemSpec, load_config
from .runner import NUMERICAL_ERRORS, compare_methods, run_experiment

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _add_overrides(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int)
    p.add_argument("--max-iter", type=int, help="solver iteration cap for PC methods")
    p.add_argument("--solver", choices=[s.value for s in Solver],
                   help="cg, cr (conjugate residuals) or minres (Lanczos)")
    p.add_argument("--hvp-mode", choices=[m.value for m in HvpMode])


def _problem_options(pairs: list[str]) -> dict:
    opts = {}
    for pair in pairs or []:
        key, sep, value = pair.partition("=")
        if not sep:
            raise ConfigError(f"expected key=value, got {pair!r}")
        for cast in (int, float):
            try:
                value = cast(value)
                break
            except ValueError:
                continue
        opts[key.replace("-", "_")] = value
    return opts


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pareto-tracer", description="Pareto front tracing experiments")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment config")
    run.add_argument("--config", required=True)
    run.add_argument("--out")
    _add_overrides(run)

    cmp_ = sub.add_parser("compare", help="run several configs on one problem and summarise")
    cmp_.add_argument("--config", required=True, nargs="+")
    cmp_.add_argument("--out", required=True)
    cmp_.add_argument("--own-reference", action="store_true",
                      help="score each run against its own reference point")
    _add_overrides(cmp_)

    val = sub.add_parser("validate", help="check a problem's gradients and HVPs")
    val.add_argument("--problem", choices=PROBLEM_NAMES)
    val.add_argument("--config", help="take the problem from this config instead")
    val.add_argument("--option", action="append", metavar="KEY=VALUE", help="problem constructor option")
    val.add_argument("--seed", type=int, default=0)
    val.add_argument("--probes", type=int, default=20)

    front = sub.add_parser("front", help="write the analytic front as CSV")
    front.add_argument("--problem", choices=PROBLEM_NAMES)
    front.add_argument("--config", help="take the problem from this config instead")
    front.add_argument("--option", action="append", metavar="KEY=VALUE", help="problem constructor option")
    front.add_argument("--resolution", type=int, default=100)
    front.add_argument("--out", help="output file (default: stdout)")
    return parser


def _overrides(args) -> dict:
    return {"seed": args.seed, "max_iter": args.max_iter, "solver": args.solver, "hvp_mode": args.hvp_mode}


def _problem_spec(args) -> ProblemSpec:
    if args.config:
        return load_config(args.config).problem
    if not args.problem:
        raise ConfigError("give --problem or --config")
    return ProblemSpec(args.problem, _problem_options(args.option))


def _run(args) -> int:
    config = load_config(args.config).with_overrides(out=args.out, **_overrides(args))
    outcome = run_experiment(config)
    m = outcome.metrics
    print(f"{config.method}: {len(outcome.archive)} front points, "
          f"{outcome.record.gradient_evals} gradient evals -> {outcome.out_dir}")
    if m is not None:
        gd = "n/a" if m.generational_distance is None else f"{m.generational_distance:.3e}"
        print(f"hypervolume {m.hypervolume:.6g}  generational distance {gd}  spread {m.spread:.4g}")
    return EXIT_OK


def _compare(args) -> int:
    configs = [load_config(path).with_overrides(**_overrides(args)) for path in args.config]
    rows = compare_methods(configs, args.out, use_shared_reference=not args.own_reference)
    for row in rows:
        reach = "never" if row["evals_to_reach"] is None else row["evals_to_reach"]
        print(f"{row['run']:<28} hv={row['hypervolume']:.6g} evals={row['gradient_evals']} reach={reach}")
    return EXIT_OK


def _validate(args) -> int:
    report = validate_problem(_problem_spec(args).build(), probe_count=args.probes, seed=args.seed)
    print(report.summary())
    return EXIT_OK if report.passed else EXIT_NUMERICAL


def _front(args) -> int:
    if args.resolution < 1:
        raise ConfigError("--resolution must be >= 1")
    spec = _problem_spec(args)
    try:
        front = analytic_front(spec.build(), args.resolution)
    except UnsupportedFront as exc:
        raise ConfigError(str(exc)) from exc
    blob = json.dumps([spec.name, spec.options, args.resolution], sort_keys=True)
    export.write_front(args.out or sys.stdout, front, hashlib.sha256(blob.encode()).hexdigest()[:16])
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    handlers = {"run": _run, "compare": _compare, "validate": _validate, "front": _front}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
