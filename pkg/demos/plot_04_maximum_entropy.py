"""
Where the maximum-entropy guess runs out
========================================

The entropy maximizer p ~ exp(sum l_ij s_i s_j) over the four cross pairs is
a natural first guess for a joint distribution. It covers the interior of
the admissible region but never its boundary.
"""

import numpy as np

from chsh_marginals import chsh_report, construct_joint_chsh, solve_maxent

for c in (0.2, 0.9, 0.999):
    sol = solve_maxent(c, c, c, c)
    print(f"C = {c}: converged={sol.converged} iterations={sol.iterations} lambda={sol.lam[0]:.6f}")

# On a facet (a CHSH combination equal to 2) the multipliers have to run off
# to infinity; every decade of accuracy costs roughly half a unit of lambda.
C = (0.5, 0.5, 0.5, -0.5)
print("facet point passes CHSH:", chsh_report(*C).ok)
for tol in (1e-6, 1e-8, 1e-10, 1e-12, 1e-14, 1e-16):
    sol = solve_maxent(*C, tol=tol)
    print(f"  tol {tol:.0e}: |lambda| = {np.abs(sol.lam).max():7.4f} converged={sol.converged}")

# The explicit construction has no trouble there.
print("construction min entry", construct_joint_chsh(*C).min_entry)
