"""
Pair marginals and the CHSH inequalities
========================================

Four +/-1 variables, but only the pairs (1,3), (1,4), (2,3), (2,4) are ever
observed together. Is there one joint distribution behind the four tables?
"""

import numpy as np

from chsh_marginals import (PairMarginals, chsh_report, construct_joint_chsh, joint_to_moments,
                            lp_feasible)
from chsh_marginals.errors import InfeasibleError

# Zero average spins and four cross correlators fix every table.
C = (0.5, 0.5, 0.5, -0.5)
pm = PairMarginals.from_moments(np.zeros(4), C)
print(pm.m13)

# One of the four CHSH combinations sits exactly at 2: a boundary point.
rep = chsh_report(*C)
print("combinations", rep.values, "pass", rep.ok)

# The explicit construction picks E, C12 and C34 in the middle of their intervals.
d = construct_joint_chsh(*C)
print("smallest entry", d.min_entry)
print("recovered cross correlators", joint_to_moments(d).cross)

# An LP over all 16 probabilities agrees, sharing no code with the construction.
print("LP feasible", lp_feasible(pm).feasible)

# The PR box pushes one combination to 4 and nothing can realize it.
try:
    construct_joint_chsh(1, 1, 1, -1)
except InfeasibleError as exc:
    print("PR box:", exc)
print("LP on PR box", lp_feasible(PairMarginals.from_moments(np.zeros(4), (1, 1, 1, -1))).feasible)

# A random sweep: the inequalities and the LP never disagree.
rng = np.random.default_rng(0)
pts = rng.uniform(-1, 1, size=(2000, 4))
agree = sum(chsh_report(*c).ok == lp_feasible(PairMarginals.from_moments(np.zeros(4), c)).feasible
            for c in pts)
print(f"{agree}/{len(pts)} agree")
