"""
Evolving receptive-field shapes
===============================

NSGA-II over (kappa_C, kappa_S, kappa_H) on a synthetic run, scored by RUL
error, monotonicity and smoothness. A small budget keeps this under a minute.
"""
import numpy as np

from sfrf import FaultMode, ReceptiveFieldParams
from sfrf.metrics import ObjectiveEvaluator
from sfrf.moea import GaConfig, evolve, select_best_rul
from sfrf.synthetic import degradation_run

record = degradation_run(40, 40, FaultMode.OUTER_RACE, noise_std=0.3, seed=1, baseline=0.02)
evaluator = ObjectiveEvaluator(record)


def progress(gen, population, archive):
    if gen % 5 == 0:
        best = min(ind.objectives[0] for ind in archive)
        print(f"generation {gen:3d}: {len(archive):2d} non-dominated, best rul_mse {best:.5f}")


result = evolve(evaluator, GaConfig(population_size=16, max_generations=20, seed=0), callback=progress)

print("\nkappa_C  kappa_S  kappa_H   rul_mse  monotonicity  MAD")
for ind in sorted(result.archive, key=lambda i: i.objectives[0]):
    r, m, s = ind.objectives
    print(f"{ind.genome[0]:7.3f}  {ind.genome[1]:7.3f}  {ind.genome[2]:7.3f}  {r:.5f}  {-m:12.3f}  {s:.2e}")

best = select_best_rul(result.archive)
empirical = evaluator.evaluate(ReceptiveFieldParams(), best.eval_seed)
print(f"\nbest member rul_mse {best.objectives[0]:.5f} vs hand-tuned {empirical.rul_mse:.5f} (same regressor seed)")
