"""Generational distance with and without corrector steps, on a front with a known truth.

    python scripts/corrector_ablation.py --steps 0 1 5 10
"""

import argparse
import dataclasses

from pareto_tracer.harness import ExperimentConfig, ProblemSpec, compare_methods


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--problem", default="quadratic", choices=["quadratic", "fonseca-fleming"])
    parser.add_argument("--steps", type=int, nargs="+", default=[0, 5])
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="runs/corrector-ablation")
    args = parser.parse_args()

    base = ExperimentConfig("pc-gn-cg", problem=ProblemSpec(args.problem), seed=args.seed)
    configs = [dataclasses.replace(base, explore=dataclasses.replace(base.explore, corrector_steps=k))
               for k in args.steps]
    rows = compare_methods(configs, args.out)
    print(f"{'corrector steps':>16}{'gen. distance':>16}{'hypervolume':>14}{'grad evals':>12}")
    for k, r in zip(args.steps, rows):
        print(f"{k:>16}{r['generational_distance']:>16.4e}{r['hypervolume']:>14.6g}{r['gradient_evals']:>12}")


if __name__ == "__main__":
    main()
