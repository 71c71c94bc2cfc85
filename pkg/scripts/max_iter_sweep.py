"""Front quality as the predictor solver's iteration cap shrinks.

    python scripts/max_iter_sweep.py --problem fairness --method pc-hessian-cg
"""

import argparse

from pareto_tracer.harness import ExperimentConfig, ProblemSpec, compare_methods
from pareto_tracer.harness.config import PC_METHODS


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--problem", default="quadratic", choices=["quadratic", "fonseca-fleming", "fairness"])
    parser.add_argument("--method", default="pc-gn-cg", choices=sorted(PC_METHODS))
    parser.add_argument("--caps", type=int, nargs="+", default=[1, 5, 10, 25, 50])
    parser.add_argument("--out", default="runs/max-iter-sweep")
    args = parser.parse_args()

    base = ExperimentConfig(args.method, problem=ProblemSpec(args.problem))
    rows = compare_methods([base.with_overrides(max_iter=k) for k in args.caps], args.out)
    ref = rows[-1]["hypervolume"]
    print(f"{'max_iter':>9}{'hypervolume':>14}{'rel. to last':>14}{'solver iters':>14}")
    for cap, r in zip(args.caps, rows):
        print(f"{cap:>9}{r['hypervolume']:>14.6g}{r['hypervolume'] / ref:>14.6f}{r['solver_iterations_total']:>14}")


if __name__ == "__main__":
    main()
