"""
Monotonicity and smoothness on toy indicators
=============================================
"""
import numpy as np

from sfrf.metrics import monotonicity, smoothness_mad, spearman

t = np.arange(50)
rng = np.random.default_rng(0)

indicators = {
    "clean ramp": t * 0.1,
    "noisy ramp": t * 0.1 + rng.normal(0, 0.5, t.size),
    "falling": np.exp(-t / 20.0),
    "sawtooth": (t % 10) * 1.0,
    "pure noise": rng.normal(0, 1, t.size),
}
for name, x in indicators.items():
    print(f"{name:10s} rho={spearman(x):+.3f}  monotonicity={monotonicity(x):.3f}  MAD={smoothness_mad(x):.3f}")

# with several features the scores are geometric means, so one flat feature zeroes monotonicity
both = np.c_[indicators["clean ramp"], np.ones(t.size)]
print("ramp + constant:", monotonicity(both))
