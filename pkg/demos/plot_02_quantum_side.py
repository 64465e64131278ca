"""
Quantum marginals beyond the bound
==================================

A singlet measured along four planar directions produces tables that no
joint distribution reproduces.
"""

import math

from chsh_marginals import (MeasurementSetup, chsh_report, eprb_marginals, lp_feasible, singlet,
                            zero_mean_rotation)
from chsh_marginals.moments import fixed_moments_from_marginals
from chsh_marginals.quantum import average_spins, product_state

setup = MeasurementSetup.planar(0, 90, 45, 135)
pm = eprb_marginals(singlet(), setup)
B, C = fixed_moments_from_marginals(pm)
print("C =", C)

rep = chsh_report(*C)
print("largest |combination|", rep.max_abs, "vs 2*sqrt(2) =", 2 * math.sqrt(2))
print("LP feasible:", lp_feasible(pm).feasible)

# A state with nonzero Bloch vectors has nonzero average spins ...
st = product_state([0, 0, 1], [0.6, 0, 0.8])
print("averages before", average_spins(st, setup))

# ... which local rotations onto each measurement plane's normal remove,
# leaving the spectrum alone.
rot = zero_mean_rotation(st, setup)
print("averages after ", average_spins(rot, setup))
print("spectrum", st.spectrum, rot.spectrum)
