"""
A classical spin model that realizes any admissible correlators
===============================================================

Two particles carry opposite angular momenta J and -J, uniformly random in
direction. Each measurement records the sign of J along a unit vector. The
cross correlator for vectors at angle t is -1 + 2t/pi, so fitting four
vectors to four angles produces a hidden-variable model.
"""

import math

import numpy as np

from chsh_marginals import AngleSet, angles_of, chsh_report, fit_vectors, joint_from_vectors_mc
from chsh_marginals.peres import FoldPath

C = (0.3, -0.2, 0.5, 0.1)
assert chsh_report(*C).ok
target = AngleSet.from_correlators(*C)
print("target angles", np.round(target.as_tuple(), 6))

# Fix a3 and a2, then swing a1 and a4 on their cones until angle(a1, a4) fits.
path = FoldPath(target.theta13, target.theta23, target.theta24)
print("reachable theta14", path.interval, "wanted", target.theta14)
for t in np.linspace(0, 1, 5):
    print(f"  fold {t:.2f}: theta14 = {path.angle(t):.4f}")

q = fit_vectors(target)
got = angles_of(q)
print("fitted", {k: round(v, 9) for k, v in got.items()})

mc = joint_from_vectors_mc(q, 1_000_000, seed=0)
for k, ij in enumerate(((1, 3), (1, 4), (2, 3), (2, 4))):
    est, se = mc.correlator(ij)
    print(f"C{ij[0]}{ij[1]}: target {C[k]:+.3f}  simulated {est:+.4f} +/- {se:.4f}")
print("same-side C12 from the model:", mc.correlator((1, 2))[0],
      "closed form", 1 - 2 * got["12"] / math.pi)
