"""
Three spins and the Bell inequalities
=====================================

With three variables all three pairs are observed, so the averages are
free. The only unknown is the triple correlator D, and it has an interval.
"""

from chsh_marginals import bell_report, construct_joint_bell, lp_feasible_bell
from chsh_marginals.construct import bell_d_interval
from chsh_marginals.moments import pair_table

B = (0.2, -0.1, 0.3)
C12, C13, C23 = 0.5, 0.5, 0.4
print("Bell sums", bell_report(C12, C13, C23).values)
print("D interval", bell_d_interval(*B, C12, C13, C23))
bj = construct_joint_bell(*B, C12, C13, C23)
print("p =", bj.p.round(4), "D =", bj.D)

# Three mutually anti-correlated spins are impossible.
anti = pair_table(0, 0, -1)
print("all anti-correlated: Bell", bell_report(-1, -1, -1).ok, "LP", lp_feasible_bell(anti, anti, anti).feasible)
