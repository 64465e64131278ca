"""Maximum-entropy ansatz for the four-spin problem with zero average spins.

The entropy maximizer with the four cross correlators fixed has the form

    p(s) = N exp(l1 s1 s3 + l2 s1 s4 + l3 s2 s3 + l4 s2 s4).

:func:`solve_maxent` finds the multipliers by damped Newton iteration on the
moment-matching map. The map's Jacobian is the covariance matrix of the four
pair products, i.e. the Hessian of the convex function log Z(l) - l.C, which
is what the step-halving line search decreases (with the residual as a
fallback merit once the objective change is lost in rounding).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .moments import JointDist4, SPINS

# Sufficient statistics (s1 s3, s1 s4, s2 s3, s2 s4) for every configuration.
FEATURES = np.stack([SPINS[:, 0] * SPINS[:, 2], SPINS[:, 0] * SPINS[:, 3],
                     SPINS[:, 1] * SPINS[:, 2], SPINS[:, 1] * SPINS[:, 3]], axis=1)

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 200
MAX_HALVINGS = 60


@dataclass(frozen=True)
class MaxEntSolution:
    lam: np.ndarray
    logN: float
    residual: float
    converged: bool
    iterations: int
    target: np.ndarray = field(repr=False, default=None)
    message: str = ""

    def joint(self) -> JointDist4:
        return maxent_joint(self.lam)

    @property
    def entropy(self) -> float:
        return entropy(self.joint())


def _log_partition(lam):
    e = FEATURES @ np.asarray(lam, dtype=float)
    mx = e.max()
    w = np.exp(e - mx)
    return mx + math.log(w.sum()), w / w.sum()


def maxent_joint(lam) -> JointDist4:
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (4,) or not np.all(np.isfinite(lam)):
        raise DomainError(f"need four finite multipliers, got {lam!r}")
    return JointDist4(_log_partition(lam)[1])


def moment_map(lam):
    """Achieved correlators and their Jacobian (the feature covariance) at ``lam``."""
    _, p = _log_partition(lam)
    C = FEATURES.T @ p
    centred = FEATURES - C
    J = centred.T @ (centred * p[:, None])
    return C, J


def entropy(d: JointDist4) -> float:
    p = d.p[d.p > 0]
    return float(-(p * np.log(p)).sum())


def solve_maxent(C13, C14, C23, C24, max_iter=DEFAULT_MAX_ITER, tol=DEFAULT_TOL) -> MaxEntSolution:
    """Fit the multipliers to the target cross correlators.

    Never raises on numerical trouble: a singular Jacobian, a stalled line
    search or the iteration cap all return ``converged=False`` together with
    the residual reached.
    """
    c = np.array([C13, C14, C23, C24], dtype=float)
    if not np.all(np.isfinite(c)) or np.any(np.abs(c) >= 1):
        raise DomainError(f"targets must lie strictly inside (-1, 1), got {c.tolist()}")

    lam = np.arctanh(c)

    def objective(l):
        return _log_partition(l)[0] - l @ c

    message = "iteration cap reached"
    it = 0
    while True:
        C, J = moment_map(lam)
        grad = C - c
        residual = float(np.abs(grad).max())
        if residual <= tol:
            message = "converged"
            break
        if it >= max_iter:
            break
        try:
            step = np.linalg.solve(J, -grad)
        except np.linalg.LinAlgError:
            message = "singular Jacobian"
            break
        if not np.all(np.isfinite(step)):
            message = "singular Jacobian"
            break
        f0 = objective(lam)
        slope = grad @ step
        t = 1.0
        for _ in range(MAX_HALVINGS):
            trial = lam + t * step
            if objective(trial) <= f0 + 1e-4 * t * slope:
                break
            # Close to the root the objective change drops below its rounding
            # error; a step that shrinks the residual is accepted instead.
            if np.abs(moment_map(trial)[0] - c).max() <= (1 - 1e-4 * t) * residual:
                break
            t *= 0.5
        else:
            message = "line search stalled"
            break
        lam = trial
        it += 1

    logZ, _ = _log_partition(lam)
    return MaxEntSolution(lam=lam, logN=float(-logZ), residual=residual,
                          converged=residual <= tol, iterations=it, target=c, message=message)
