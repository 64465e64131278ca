"""Feasibility of the marginal problem as a linear program.

The unknowns are the probabilities of all sign configurations. The equality
constraints are normalization plus one row per entry of every given pair
table; redundant rows are kept as-is. Feasibility is decided by a dense
phase-1 simplex with Bland's rule written here, so this oracle shares no code
with the algebraic construction it is used to check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericError
from .moments import (CONSISTENCY_TOL, NORM_TOL, JointDist4, PairMarginals, check_table,
                      single_spin_marginals)

PIVOT_TOL = 1e-11
INFEASIBLE_TOL = 1e-9
MAX_PIVOTS = 10_000


@dataclass(frozen=True)
class LpProblem:
    """Equality system ``A p = b, p >= 0`` with 0/1 coefficients."""

    A: np.ndarray
    b: np.ndarray
    n_spins: int
    row_labels: tuple = field(default=())


@dataclass(frozen=True)
class LpResult:
    feasible: bool
    infeasibility: float  # phase-1 objective: leftover artificial mass
    witness: np.ndarray | None  # probabilities in +1-first lexicographic order
    residual: float  # max |A p - b| of the witness (nan when infeasible)
    pivots: int

    def joint(self) -> JointDist4:
        return JointDist4(self.witness)


def marginal_problem(tables: dict, n_spins: int) -> LpProblem:
    """Build the LP for pair tables keyed by 1-based index pairs ``(i, j)``."""
    configs = np.array(list(itertools.product((1, -1), repeat=n_spins)))
    rows = [np.ones(len(configs))]
    rhs = [1.0]
    labels = ["sum"]
    for (i, j), t in sorted(tables.items()):
        t = np.asarray(t, dtype=float)
        for a_idx, a in enumerate((1, -1)):
            for b_idx, b in enumerate((1, -1)):
                rows.append(((configs[:, i - 1] == a) & (configs[:, j - 1] == b)).astype(float))
                rhs.append(t[a_idx, b_idx])
                labels.append(f"p{i}{j}({'+-'[a_idx]},{'+-'[b_idx]})")
    return LpProblem(A=np.array(rows), b=np.array(rhs), n_spins=n_spins, row_labels=tuple(labels))


def phase_one(A, b, pivot_tol=PIVOT_TOL, max_pivots=MAX_PIVOTS):
    """Minimize the artificial mass for ``A x = b, x >= 0``.

    Returns ``(objective, x, pivots)``. Entering and leaving variables follow
    Bland's smallest-index rule; artificial columns never re-enter.
    """
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    m, n = A.shape
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1

    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    # Reduced-cost row of the phase-1 objective (sum of artificials).
    T[m, :n] = -A.sum(axis=0)
    T[m, -1] = -b.sum()
    basis = list(range(n, n + m))

    pivots = 0
    while True:
        candidates = np.nonzero(T[m, :n] < -pivot_tol)[0]
        if candidates.size == 0:
            break
        col = int(candidates[0])
        column = T[:m, col]
        rows = np.nonzero(column > pivot_tol)[0]
        if rows.size == 0:
            # Cannot happen for a bounded phase-1 problem; stop rather than loop.
            break
        ratios = T[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-14 * max(1.0, abs(best))]
        row = int(min(ties, key=lambda r: basis[r]))

        T[row] /= T[row, col]
        for r in range(m + 1):
            if r != row and T[r, col] != 0.0:
                T[r] -= T[r, col] * T[row]
        basis[row] = col
        pivots += 1
        if pivots >= max_pivots:
            raise NumericError(f"simplex did not terminate within {max_pivots} pivots")

    x = np.zeros(n)
    art = 0.0
    for r, var in enumerate(basis):
        if var < n:
            x[var] = T[r, -1]
        else:
            art += T[r, -1]
    return max(float(art), 0.0), x, pivots


def solve(problem: LpProblem) -> LpResult:
    obj, x, pivots = phase_one(problem.A, problem.b)
    if obj > INFEASIBLE_TOL:
        return LpResult(False, obj, None, float("nan"), pivots)
    x = np.where(x < 0, 0.0, x)
    x = x / x.sum()
    residual = float(np.abs(problem.A @ x - problem.b).max())
    return LpResult(True, obj, x, residual, pivots)


def _validated(tables, consistency_tol, norm_tol):
    for (i, j), t in tables.items():
        check_table(t, f"{i}{j}", norm_tol)
    single_spin_marginals(tables, consistency_tol)


def lp_feasible(pm: PairMarginals, consistency_tol=CONSISTENCY_TOL, norm_tol=NORM_TOL) -> LpResult:
    """Does any 16-entry distribution reproduce the four cross-pair tables?"""
    tables = pm.tables()
    _validated(tables, consistency_tol, norm_tol)
    return solve(marginal_problem(tables, 4))


def lp_feasible_bell(m12, m13, m23, consistency_tol=CONSISTENCY_TOL, norm_tol=NORM_TOL) -> LpResult:
    """Three-spin version: tables p(s1,s2), p(s1,s3), p(s2,s3)."""
    tables = {(1, 2): np.asarray(m12, float), (1, 3): np.asarray(m13, float),
              (2, 3): np.asarray(m23, float)}
    _validated(tables, consistency_tol, norm_tol)
    return solve(marginal_problem(tables, 3))
