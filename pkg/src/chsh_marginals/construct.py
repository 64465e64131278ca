"""Explicit joint distributions matching admissible pair marginals.

Four spins (CHSH case)
    With all average spins and triple correlators set to zero, positivity of
    the moment expansion reduces to four conditions on E, C12 + C34 and
    C12 - C34. They are solvable exactly when |G1|+|G2|+|G3|+|G4| <= 4,
    and we pick the midpoint of every resulting interval.

Three spins (Bell case)
    The pair tables fix B_i and C_ij; the single free parameter D (the triple
    correlator) is taken at the midpoint of its feasible interval.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InfeasibleError, UnsupportedError
from .inequalities import G_SIGNS, PASS_TOL
from .moments import (CONSISTENCY_TOL, NORM_TOL, JointDist4, MomentVector, PairMarginals,
                      fixed_moments_from_marginals, moments_to_joint, single_spin_marginals)

# Emptiness threshold for the intervals. It matches the CHSH pass tolerance so
# that "report passes" and "construction succeeds" are the same predicate.
FEAS_TOL = PASS_TOL


@dataclass(frozen=True)
class FeasibleIntervals:
    G: tuple
    E_interval: tuple
    E: float
    sum_interval: tuple
    diff_interval: tuple

    @property
    def empty(self) -> bool:
        return self.E_interval[0] > self.E_interval[1] + FEAS_TOL


def _check_unit(values, n):
    c = np.asarray(values, dtype=float).reshape(-1)
    if c.shape != (n,) or not np.all(np.isfinite(c)) or np.any(np.abs(c) > 1 + 1e-12):
        raise DomainError(f"correlators must lie in [-1, 1], got {c.tolist()}")
    return np.clip(c, -1.0, 1.0)


def sum_diff_intervals(G, E):
    """Bounds on C12 + C34 and C12 - C34 for a chosen four-spin correlator E."""
    g1, g2, g3, g4 = np.abs(G)
    return (-1 + g1 - E, 1 - g2 + E), (-1 + g3 + E, 1 - g4 - E)


def feasible_intervals(C13, C14, C23, C24) -> FeasibleIntervals:
    c = _check_unit((C13, C14, C23, C24), 4)
    G = G_SIGNS @ c
    a = np.abs(G)
    lo = (a[0] + a[1]) / 2 - 1
    hi = 1 - (a[2] + a[3]) / 2
    if lo > hi + FEAS_TOL:
        raise InfeasibleError(
            f"|G1|+|G2|+|G3|+|G4| = {a.sum():.12g} exceeds 4", violation=float(a.sum() - 4))
    E = (lo + hi) / 2
    s_int, d_int = sum_diff_intervals(G, E)
    return FeasibleIntervals(G=tuple(G.tolist()), E_interval=(float(lo), float(hi)), E=float(E),
                             sum_interval=tuple(map(float, s_int)),
                             diff_interval=tuple(map(float, d_int)))


def _clean(p, floor):
    # Clamp tiny negatives from rounding, then renormalize.
    p = np.asarray(p, dtype=float)
    if p.min() < -floor:
        raise InfeasibleError(f"constructed entry {p.min():.3e} is negative", violation=-p.min())
    p = np.where(p < 0, 0.0, p)
    return p / p.sum()


def chsh_moments(C13, C14, C23, C24, E=None) -> MomentVector:
    """Full moment vector of the constructed distribution (B = D = 0).

    ``E`` defaults to the midpoint of its interval; any value inside the
    interval is accepted.
    """
    fi = feasible_intervals(C13, C14, C23, C24)
    if E is None:
        s_int, d_int = fi.sum_interval, fi.diff_interval
        E = fi.E
    else:
        lo, hi = fi.E_interval
        if not lo - FEAS_TOL <= E <= hi + FEAS_TOL:
            raise DomainError(f"E = {E!r} outside its interval [{lo!r}, {hi!r}]")
        s_int, d_int = sum_diff_intervals(fi.G, E)
    total = (s_int[0] + s_int[1]) / 2
    diff = (d_int[0] + d_int[1]) / 2
    C12 = (total + diff) / 2
    C34 = (total - diff) / 2
    C = np.clip([C12, C13, C14, C23, C24, C34], -1.0, 1.0)
    return MomentVector(B=np.zeros(4), C=C, D=np.zeros(4), E=float(np.clip(E, -1.0, 1.0)))


def construct_joint_chsh(C13, C14, C23, C24, E=None) -> JointDist4:
    """A distribution with zero average spins whose cross correlators are the inputs.

    Raises :class:`InfeasibleError` when the CHSH inequalities fail.
    """
    m = chsh_moments(C13, C14, C23, C24, E=E)
    q = moments_to_joint(m)
    return JointDist4(_clean(q.p, FEAS_TOL))


def construct_from_marginals(pm: PairMarginals, b_tol=CONSISTENCY_TOL,
                             consistency_tol=CONSISTENCY_TOL, norm_tol=NORM_TOL) -> JointDist4:
    """CHSH-case construction starting from pair tables.

    Only zero average spins are handled; nonzero ones raise
    :class:`UnsupportedError` (use the LP oracle instead).
    """
    B, Cfixed = fixed_moments_from_marginals(pm, consistency_tol, norm_tol)
    if np.max(np.abs(B)) > b_tol:
        raise UnsupportedError(
            f"average spins {B.tolist()} are nonzero; the algebraic construction needs B = 0, "
            "use the LP oracle")
    return construct_joint_chsh(*Cfixed)


# --- three spins ------------------------------------------------------------

BELL_CONFIGS = tuple(itertools.product((1, -1), repeat=3))
_S3 = np.array(BELL_CONFIGS, dtype=float)
_PARITY = _S3.prod(axis=1)


@dataclass(frozen=True)
class BellJoint:
    """Probabilities of the 8 three-spin configurations, +1-first order."""

    p: np.ndarray
    D: float = 0.0
    D_interval: tuple = (0.0, 0.0)

    def __post_init__(self):
        p = np.array(self.p, dtype=float).reshape(-1)
        if p.shape != (8,):
            raise DomainError(f"expected 8 probabilities, got {p.size}")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    def pair_table(self, i, j) -> np.ndarray:
        axes = tuple(k for k in range(3) if k not in (i - 1, j - 1))
        t = self.p.reshape(2, 2, 2).sum(axis=axes)
        return t if i < j else t.T

    def moments(self) -> dict:
        out = {f"B{i + 1}": float(_S3[:, i] @ self.p) for i in range(3)}
        for i, j in ((1, 2), (1, 3), (2, 3)):
            out[f"C{i}{j}"] = float((_S3[:, i - 1] * _S3[:, j - 1]) @ self.p)
        out["D"] = float(_PARITY @ self.p)
        return out


def bell_polynomial(B, C12, C13, C23) -> np.ndarray:
    """A(s1,s2,s3) = 1 + sum B_i s_i + sum C_ij s_i s_j over the 8 configurations."""
    B = np.asarray(B, dtype=float)
    s1, s2, s3 = _S3.T
    return 1 + _S3 @ B + C12 * s1 * s2 + C13 * s1 * s3 + C23 * s2 * s3


def bell_d_interval(B1, B2, B3, C12, C13, C23):
    A = bell_polynomial((B1, B2, B3), C12, C13, C23)
    hi = A[_PARITY < 0].min()
    lo = (-A[_PARITY > 0]).max()
    return float(lo), float(hi)


def construct_joint_bell(B1, B2, B3, C12, C13, C23) -> BellJoint:
    """Three-spin distribution with the given averages and pair correlators."""
    vals = _check_unit((B1, B2, B3, C12, C13, C23), 6)
    B, (C12, C13, C23) = vals[:3], vals[3:]
    lo, hi = bell_d_interval(*B, C12, C13, C23)
    if lo > hi + FEAS_TOL:
        raise InfeasibleError(f"no triple correlator fits: D interval [{lo!r}, {hi!r}] is empty",
                              violation=lo - hi)
    D = (lo + hi) / 2
    p = (bell_polynomial(B, C12, C13, C23) + D * _PARITY) / 8
    return BellJoint(p=_clean(p, FEAS_TOL), D=D, D_interval=(lo, hi))


def bell_moments_from_tables(tables: dict, consistency_tol=CONSISTENCY_TOL):
    """``(B1, B2, B3, C12, C13, C23)`` from tables keyed (1,2), (1,3), (2,3)."""
    Bd = single_spin_marginals(tables, consistency_tol)
    Cs = []
    for ij in ((1, 2), (1, 3), (2, 3)):
        t = np.asarray(tables[ij], dtype=float)
        Cs.append(t[0, 0] - t[0, 1] - t[1, 0] + t[1, 1])
    return (Bd[1], Bd[2], Bd[3], *Cs)
