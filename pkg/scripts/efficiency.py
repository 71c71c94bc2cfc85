"""Gradient evaluations needed to reach 95% of the target hypervolume: PC versus pooled
multi-gradient descent from random starts.

    python scripts/efficiency.py --epochs 100 200 400
"""

import argparse

from pareto_tracer.harness import ExperimentConfig, ProblemSpec, SmgdBaselineConfig, compare_methods
from pareto_tracer.harness.config import PC_METHODS


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--problem", default="quadratic", choices=["quadratic", "fonseca-fleming", "fairness"])
    parser.add_argument("--methods", nargs="+", default=["pc-gn-cg", "pc-hessian-cg"], choices=sorted(PC_METHODS))
    parser.add_argument("--inits", type=int, default=10)
    parser.add_argument("--epochs", type=int, nargs="+", default=[100, 200, 400])
    parser.add_argument("--out", default="runs/efficiency")
    args = parser.parse_args()

    problem = ProblemSpec(args.problem)
    configs = [ExperimentConfig(m, problem=problem) for m in args.methods]
    configs += [ExperimentConfig("smgd", problem=problem, smgd=SmgdBaselineConfig(args.inits, e)) for e in args.epochs]
    rows = compare_methods(configs, args.out)
    print(f"{'run':<16}{'grad evals':>12}{'evals to 95%':>14}{'hypervolume':>14}{'wall ms':>10}")
    for r in rows:
        reach = "never" if r["evals_to_reach"] is None else r["evals_to_reach"]
        print(f"{r['run']:<16}{r['gradient_evals']:>12}{reach:>14}{r['hypervolume']:>14.6g}{r['wall_time_ms']:>10}")


if __name__ == "__main__":
    main()
