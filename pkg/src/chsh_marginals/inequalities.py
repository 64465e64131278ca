"""Inequality families for the four- and three-spin marginal problems.

All reports carry the raw inequality values so callers can see the margin to
the boundary, not only a pass/fail flag. Boundary points pass: a value may
exceed its bound by at most ``PASS_TOL``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

PASS_TOL = 1e-10
DOMAIN_TOL = 1e-12

# Rows give the signs of (C13, C14, C23, C24) in each CHSH combination.
CHSH_SIGNS = np.array([
    [1, 1, 1, -1],
    [1, 1, -1, 1],
    [1, -1, 1, 1],
    [-1, 1, 1, 1],
], dtype=float)

# Rows give the signs of (C13, C14, C23, C24) in G1..G4.
G_SIGNS = np.array([
    [1, 1, 1, 1],
    [1, -1, -1, 1],
    [1, -1, 1, -1],
    [1, 1, -1, -1],
], dtype=float)

# Rows give the signs of (C12, C13, C23); each sum must stay <= 1.
BELL_SIGNS = np.array([
    [1, 1, -1],
    [1, -1, 1],
    [-1, 1, 1],
    [-1, -1, -1],
], dtype=float)

# Rows give the signs of (theta13, theta23, theta24, theta14); each sum must
# lie in [0, 2*pi].
ANGLE_SIGNS = np.array([
    [1, 1, 1, -1],
    [1, 1, -1, 1],
    [1, -1, 1, 1],
    [-1, 1, 1, 1],
], dtype=float)


def _correlators(values, n, tol=DOMAIN_TOL):
    c = np.asarray(values, dtype=float).reshape(-1)
    if c.shape != (n,):
        raise DomainError(f"expected {n} correlators, got {c.size}")
    if not np.all(np.isfinite(c)) or np.any(np.abs(c) > 1 + tol):
        raise DomainError(f"correlators must lie in [-1, 1], got {c.tolist()}")
    return c


@dataclass(frozen=True)
class ChshReport:
    """CHSH combinations for (C13, C14, C23, C24).

    ``values[k]`` is the k-th signed combination; it must lie in [-2, 2].
    ``passes`` has eight flags ordered (lower_1, upper_1, ..., lower_4,
    upper_4). ``G`` are the sign-pattern sums whose absolute values add up
    to ``single_value``.
    """

    C: tuple
    values: tuple
    passes: tuple
    G: tuple
    single_value: float

    @property
    def ok(self) -> bool:
        return all(self.passes)

    @property
    def margin(self) -> float:
        """Distance to the nearest CHSH bound (negative when violated)."""
        return 2.0 - max(abs(v) for v in self.values)

    @property
    def max_abs(self) -> float:
        return max(abs(v) for v in self.values)

    def as_dict(self) -> dict:
        return {
            "C": dict(zip(("13", "14", "23", "24"), self.C)),
            "combinations": list(self.values),
            "passes": list(self.passes),
            "G": list(self.G),
            "single_inequality": self.single_value,
            "margin": self.margin,
            "pass": self.ok,
        }


def chsh_report(C13, C14, C23, C24, tol=PASS_TOL) -> ChshReport:
    c = _correlators((C13, C14, C23, C24), 4)
    values = CHSH_SIGNS @ c
    passes = []
    for v in values:
        passes += [bool(v >= -2 - tol), bool(v <= 2 + tol)]
    G = G_SIGNS @ c
    return ChshReport(C=tuple(c.tolist()), values=tuple(values.tolist()),
                      passes=tuple(passes), G=tuple(G.tolist()),
                      single_value=float(np.abs(G).sum()))


def single_inequality(C13, C14, C23, C24) -> float:
    """|G1| + |G2| + |G3| + |G4|; the correlators are admissible iff this is <= 4."""
    c = _correlators((C13, C14, C23, C24), 4)
    return float(np.abs(G_SIGNS @ c).sum())


def g_vector(C13, C14, C23, C24) -> np.ndarray:
    return G_SIGNS @ _correlators((C13, C14, C23, C24), 4)


@dataclass(frozen=True)
class BellReport:
    C: tuple  # (C12, C13, C23)
    values: tuple
    passes: tuple

    @property
    def ok(self) -> bool:
        return all(self.passes)

    @property
    def margin(self) -> float:
        return 1.0 - max(self.values)

    def as_dict(self) -> dict:
        return {"C": dict(zip(("12", "13", "23"), self.C)), "sums": list(self.values),
                "passes": list(self.passes), "margin": self.margin, "pass": self.ok}


def bell_report(C12, C13, C23, tol=PASS_TOL) -> BellReport:
    c = _correlators((C12, C13, C23), 3)
    values = BELL_SIGNS @ c
    return BellReport(C=tuple(c.tolist()), values=tuple(values.tolist()),
                      passes=tuple(bool(v <= 1 + tol) for v in values))


@dataclass(frozen=True)
class AngleReport:
    theta: tuple  # (theta13, theta23, theta24, theta14)
    values: tuple
    passes: tuple  # (lower_1, upper_1, ..., lower_4, upper_4)

    @property
    def ok(self) -> bool:
        return all(self.passes)


def angle_chsh_report(theta13, theta23, theta24, theta14, tol=PASS_TOL) -> AngleReport:
    """Angle form of CHSH: each signed sum of the four angles lies in [0, 2*pi]."""
    th = np.array([theta13, theta23, theta24, theta14], dtype=float)
    if not np.all(np.isfinite(th)) or np.any(th < -DOMAIN_TOL) or np.any(th > math.pi + DOMAIN_TOL):
        raise DomainError(f"angles must lie in [0, pi], got {th.tolist()}")
    values = ANGLE_SIGNS @ th
    passes = []
    for v in values:
        passes += [bool(v >= -tol), bool(v <= 2 * math.pi + tol)]
    return AngleReport(theta=tuple(th.tolist()), values=tuple(values.tolist()),
                       passes=tuple(passes))


@dataclass(frozen=True)
class PositivityReport:
    """Values of 1 + a B_i + b B_j + a b C_ij for (a, b) in ++, +-, -+, --."""

    values: tuple
    passes: tuple

    @property
    def ok(self) -> bool:
        return all(self.passes)


def marginal_positivity_report(Bi, Bj, Cij, tol=PASS_TOL) -> PositivityReport:
    vals = []
    for a in (1, -1):
        for b in (1, -1):
            vals.append(1 + a * Bi + b * Bj + a * b * Cij)
    return PositivityReport(values=tuple(float(v) for v in vals),
                            passes=tuple(bool(v >= -tol) for v in vals))
