"""Clock-transition location and the opposite-helicity selection rule.

Finds the df/dB = 0 point of the allowed and forbidden members of the
7 GHz doublet, then tabulates their circular drive couplings across the
30-70 mT range to show that the two members always couple to opposite
rotation senses while their field slopes track each other (the curves
differ exactly by twice the nuclear Zeeman term).
"""

import numpy as np

from bispin import (SpinSystem, StateLabel, TransitionSpec, find_clock_field,
                    list_transitions, matrix_elements)
from bispin.transitions import write_transitions_csv

bi = SpinSystem()
allowed = TransitionSpec(upper=StateLabel(5, -1), lower=StateLabel(4, -2))
forbidden = TransitionSpec(upper=StateLabel(5, -2), lower=StateLabel(4, -1))

for name, spec in [("allowed", allowed), ("forbidden", forbidden)]:
    clock = find_clock_field(bi, spec, (10e-3, 200e-3))
    print(f"{name:9s} clock: B_ct = {clock.field_bct_t * 1e3:8.3f} mT, "
          f"f_ct = {clock.frequency_hz / 1e9:.6f} GHz, "
          f"curvature = {clock.curvature_hz_per_t2:.3e} Hz/T^2")

print("\n  B0 (mT)   df/dB allowed   df/dB forbidden   sense(a)  sense(f)"
      "   selectivity")
for b0 in np.linspace(30e-3, 70e-3, 9):
    da = matrix_elements(bi, b0, allowed)
    df = matrix_elements(bi, b0, forbidden)
    print(f"  {b0 * 1e3:7.2f}   {da.dfdb_hz_per_t / 1e9:+9.4f} GHz/T "
          f"  {df.dfdb_hz_per_t / 1e9:+9.4f} GHz/T     {da.dominant_sense:3s} "
          f"     {df.dominant_sense:3s}     >= {min(da.selectivity, df.selectivity):.1e}")

print("\nthe slope difference is 2 gamma_n =", 2 * bi.gamma_nuclear_hz_per_t / 1e6,
      "MHz/T at every field")

listing = list_transitions(bi, 50.19e-3, 7.0805e9, 5e6)
write_transitions_csv("demos/output/doublet_50p19mT.csv", 50.19e-3, listing)
print("wrote demos/output/doublet_50p19mT.csv")
