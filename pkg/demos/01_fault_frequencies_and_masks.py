"""
Fault frequencies and receptive-field masks
===========================================

Where do the four fault modes of an LDK UER204 bearing put energy at 35 Hz,
and what does a center-surround filter anchored on them look like?
"""
import numpy as np

from sfrf import LDK_UER204, FaultMode, OperatingMode, ReceptiveFieldParams
from sfrf.bearing import characteristic_frequencies, fault_frequency_set
from sfrf.masks import build_dog_mask, frequency_grid

mode = OperatingMode(shaft_frequency=35.0, sampling_frequency=25600.0)
cf = characteristic_frequencies(LDK_UER204, mode)
print(f"BPFO {cf.bpfo:.4f}  BPFI {cf.bpfi:.4f}  BSF {cf.bsf:.4f}  FTF {cf.ftf:.4f} Hz")

# two harmonics, two sidebands on each side
for fm in FaultMode:
    freqs = fault_frequency_set(fm, cf, mode.shaft_frequency, 2, 2)
    print(f"{fm.value:6s} {len(freqs):2d} lines: " + " ".join(f"{f:.1f}" for f in freqs))

# the outer-race receptive field on the 0.78125 Hz grid of a 1.28 s snapshot
grid = frequency_grid(mode.sampling_frequency, 32768)
mask = build_dog_mask(fault_frequency_set(FaultMode.OUTER_RACE, cf, 35.0), ReceptiveFieldParams(), grid)
window = (grid > cf.bpfo - 10) & (grid < cf.bpfo + 10)
print("\nfrequency  center  surround  signed gain")
for f, c, s, g in zip(grid[window][::2], mask.center.gains[window][::2], mask.surround.gains[window][::2], mask.signed_gains[window][::2]):
    print(f"{f:8.2f}  {c:6.3f}  {s:8.3f}  {g:+.3f}")
# the dip either side of the peak is the inhibitory surround
print("most negative gain:", round(float(mask.signed_gains.min()), 4))
