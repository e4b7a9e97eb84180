"""
How much history does the RUL regressor need?
=============================================

Buffering the last n SFRF vectors gives 8(n+1) features per row. Here the
bagged trees are refit 30 times per order and the training loss compared.
"""
from sfrf import FaultMode, ReceptiveFieldParams, compute_trajectory
from sfrf.pipeline import SfrfVector, buffered_indicator
from sfrf.regressor import order_sweep_trajectory
from sfrf.synthetic import degradation_run

record = degradation_run(60, 60, FaultMode.OUTER_RACE, noise_std=0.3, seed=1, baseline=0.02)
traj = compute_trajectory(record, ReceptiveFieldParams())
print("order 10 row length:", buffered_indicator([SfrfVector(row) for row in traj.matrix], 10).values.size)

sweep = order_sweep_trajectory(traj, [0, 1, 2, 5, 10], repeats=30, seed=0)
print("\norder   min       q1        median    q3        max")
for order, stats in sweep.summary().items():
    print(f"{order:5d}  " + "  ".join(f"{v:.6f}" for v in stats))
