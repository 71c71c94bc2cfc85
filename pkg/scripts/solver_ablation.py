"""Every PC curvature/solver pairing on one problem, scored against a shared reference.

    python scripts/solver_ablation.py --problem fairness --out runs/solvers
"""

import argparse

from pareto_tracer.harness import ExperimentConfig, ProblemSpec, compare_methods
from pareto_tracer.harness.config import PC_METHODS


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--problem", default="quadratic", choices=["quadratic", "fonseca-fleming", "fairness"])
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="runs/solver-ablation")
    args = parser.parse_args()

    configs = [ExperimentConfig(m, problem=ProblemSpec(args.problem), seed=args.seed) for m in PC_METHODS]
    rows = compare_methods(configs, args.out)
    best = max(r["hypervolume"] for r in rows)
    print(f"{'method':<22}{'hypervolume':>14}{'rel. to best':>14}{'grad evals':>12}{'hvp applies':>13}")
    for r in rows:
        print(f"{r['method']:<22}{r['hypervolume']:>14.6g}{r['hypervolume'] / best:>14.4f}"
              f"{r['gradient_evals']:>12}{r['hvp_applies']:>13}")


if __name__ == "__main__":
    main()
