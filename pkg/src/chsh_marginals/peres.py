"""Classical hidden-variable model: a shared angular momentum measured along unit vectors.

A source emits two particles with opposite angular momenta +J and -J, with J
uniform on the sphere. Spins 1, 2 are ``sgn(a1.J)``, ``sgn(a2.J)`` and spins
3, 4 are ``-sgn(a3.J)``, ``-sgn(a4.J)``. Cross-side correlators are
``-1 + 2*theta/pi`` with theta the angle between the two measurement vectors,
so matching four given correlators is a problem of placing four unit vectors
with four prescribed angles. :func:`fit_vectors` solves that by folding a
planar chain a1 - a3 - a2 - a4 out of the plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InfeasibleError, NumericError
from .inequalities import DOMAIN_TOL, angle_chsh_report
from .moments import CROSS_PAIRS, PAIRS, SPINS, JointDist4, MomentVector

UNIT_TOL = 1e-12
BISECT_TOL = 1e-10
BISECT_MAX_ITER = 200
REACH_TOL = 1e-12

_Z = np.array([0.0, 0.0, 1.0])


def corr_from_angle(theta) -> float:
    if not -DOMAIN_TOL <= theta <= math.pi + DOMAIN_TOL:
        raise DomainError(f"angle {theta!r} outside [0, pi]")
    return -1.0 + 2.0 * min(max(theta, 0.0), math.pi) / math.pi


def angle_from_corr(C) -> float:
    if not -1 - DOMAIN_TOL <= C <= 1 + DOMAIN_TOL:
        raise DomainError(f"correlator {C!r} outside [-1, 1]")
    return math.pi * (1.0 + min(max(C, -1.0), 1.0)) / 2.0


def _unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def angle_between(a, b) -> float:
    """Angle via atan2; accurate near 0 and pi where arccos is not."""
    return math.atan2(np.linalg.norm(np.cross(a, b)), float(np.dot(a, b)))


@dataclass(frozen=True)
class VectorQuad:
    a1: np.ndarray
    a2: np.ndarray
    a3: np.ndarray
    a4: np.ndarray

    def __post_init__(self):
        for name in ("a1", "a2", "a3", "a4"):
            v = np.array(getattr(self, name), dtype=float).reshape(-1)
            if v.shape != (3,):
                raise DomainError(f"{name} must be a 3-vector")
            if abs(np.linalg.norm(v) - 1.0) > UNIT_TOL:
                raise DomainError(f"{name} has norm {float(np.linalg.norm(v))!r}, expected 1")
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    @classmethod
    def normalized(cls, a1, a2, a3, a4) -> "VectorQuad":
        return cls(*(_unit(v) for v in (a1, a2, a3, a4)))

    def matrix(self) -> np.ndarray:
        return np.stack([self.a1, self.a2, self.a3, self.a4])

    def reflect(self, which) -> "VectorQuad":
        """Negate vectors; ``which`` is an iterable of 1-based indices."""
        vs = [self.a1, self.a2, self.a3, self.a4]
        for k in which:
            vs[k - 1] = -vs[k - 1]
        return VectorQuad(*vs)


@dataclass(frozen=True)
class AngleSet:
    theta13: float
    theta23: float
    theta24: float
    theta14: float

    def __post_init__(self):
        for v in self.as_tuple():
            if not (-DOMAIN_TOL <= v <= math.pi + DOMAIN_TOL):
                raise DomainError(f"angle {v!r} outside [0, pi]")

    def as_tuple(self):
        return (self.theta13, self.theta23, self.theta24, self.theta14)

    @classmethod
    def from_correlators(cls, C13, C14, C23, C24) -> "AngleSet":
        return cls(angle_from_corr(C13), angle_from_corr(C23), angle_from_corr(C24),
                   angle_from_corr(C14))

    def correlators(self) -> tuple:
        """(C13, C14, C23, C24)."""
        return (corr_from_angle(self.theta13), corr_from_angle(self.theta14),
                corr_from_angle(self.theta23), corr_from_angle(self.theta24))


def angles_of(q: VectorQuad) -> dict:
    """All six pairwise angles keyed ``"12"``, ``"13"``, ... ``"34"``."""
    M = q.matrix()
    G = np.clip(M @ M.T, -1.0, 1.0)
    return {f"{i}{j}": float(np.arccos(G[i - 1, j - 1])) for i, j in PAIRS}


def reachable_interval(theta13, theta23, theta24):
    """Exact range of angle(a1, a4) over all placements with the three angles fixed.

    a1 ranges over a circle of radius theta13 around a3 and a4 over a circle
    of radius theta24 around a2, the centres being theta23 apart. The
    interval coincides with the angle-form CHSH bounds on theta14
    intersected with [0, pi].
    """
    r1, d, r2 = theta13, theta23, theta24
    lo = max(0.0, d - r1 - r2, r1 - d - r2, r2 - d - r1, r1 + d + r2 - 2 * math.pi)
    hi = min(math.pi, r1 + d + r2, 2 * math.pi - r1 - d + r2, 2 * math.pi + r1 - d - r2,
             2 * math.pi - r1 + d - r2)
    return lo, hi


class FoldPath:
    """One-parameter family of quads with angles (13), (23), (24) held fixed.

    a3 sits on the x axis and a2 in the xy plane. a1 turns on its cone about
    a3 by azimuth ``phi1`` and a4 on its cone about a2 by ``phi4``
    (azimuth 0 is in-plane, towards increasing polar angle; positive azimuth
    lifts the vector towards +z). ``t`` interpolates both azimuths linearly
    from the configuration of largest angle(a1, a4) (``t = 0``) to the
    configuration of smallest angle (``t = 1``).
    """

    def __init__(self, theta13, theta23, theta24):
        self.theta13, self.theta23, self.theta24 = theta13, theta23, theta24
        self.a3 = np.array([1.0, 0.0, 0.0])
        self.a2 = np.array([math.cos(theta23), math.sin(theta23), 0.0])
        self._u1 = np.array([0.0, 1.0, 0.0])
        self._v2 = np.array([-math.sin(theta23), math.cos(theta23), 0.0])
        self.interval = reachable_interval(theta13, theta23, theta24)
        self.start = self._extreme(maximize=True)
        self.end = self._extreme(maximize=False)

    def a1(self, phi1):
        return (math.cos(self.theta13) * self.a3
                + math.sin(self.theta13) * (math.cos(phi1) * self._u1 + math.sin(phi1) * _Z))

    def a4(self, phi4):
        return (math.cos(self.theta24) * self.a2
                + math.sin(self.theta24) * (math.cos(phi4) * self._v2 + math.sin(phi4) * _Z))

    def _cone_meet(self, c24):
        # Unit x above the plane with x.a3 = cos(theta13) and x.a2 = c24.
        s = math.sin(self.theta23)
        if abs(s) < 1e-12:
            return None
        c = math.cos(self.theta23)
        c13 = math.cos(self.theta13)
        alpha = (c13 - c * c24) / (1 - c * c)
        beta = (c24 - c * c13) / (1 - c * c)
        w = alpha * self.a3 + beta * self.a2
        gamma2 = 1.0 - float(w @ w)
        if gamma2 < -1e-9:
            return None
        return w + math.sqrt(max(gamma2, 0.0)) * _Z

    def _azimuths(self, a1, a4):
        p1 = a1 - (a1 @ self.a3) * self.a3
        p4 = a4 - (a4 @ self.a2) * self.a2
        return (math.atan2(p1 @ _Z, p1 @ self._u1), math.atan2(p4 @ _Z, p4 @ self._v2))

    def _extreme(self, maximize):
        lo, hi = self.interval
        if maximize and hi >= math.pi - REACH_TOL:
            x = self._cone_meet(-math.cos(self.theta24))
            if x is not None:
                return self._azimuths(x, -x)
        if not maximize and lo <= REACH_TOL:
            x = self._cone_meet(math.cos(self.theta24))
            if x is not None:
                return self._azimuths(x, x)
        best = None
        for phi1 in (math.pi, 0.0):
            for phi4 in (0.0, math.pi):
                ang = angle_between(self.a1(phi1), self.a4(phi4))
                key = -ang if maximize else ang
                if best is None or key < best[0] - 1e-15:
                    best = (key, (phi1, phi4))
        return best[1]

    def azimuths(self, t):
        (s1, s4), (e1, e4) = self.start, self.end
        return s1 + t * (e1 - s1), s4 + t * (e4 - s4)

    def quad(self, t) -> VectorQuad:
        phi1, phi4 = self.azimuths(t)
        return VectorQuad.normalized(self.a1(phi1), self.a2, self.a3, self.a4(phi4))

    def angle(self, t) -> float:
        phi1, phi4 = self.azimuths(t)
        return angle_between(self.a1(phi1), self.a4(phi4))

    def solve(self, theta14, tol=BISECT_TOL, max_iter=BISECT_MAX_ITER) -> float:
        """Fold parameter in [0, 1] at which angle(a1, a4) equals ``theta14``."""
        lo_ang, hi_ang = self.interval
        target = min(max(theta14, lo_ang), hi_ang)
        t0, t1 = 0.0, 1.0
        f0, f1 = self.angle(t0) - target, self.angle(t1) - target
        if abs(f0) <= 1e-15:
            return t0
        if abs(f1) <= 1e-15:
            return t1
        if f0 < 0 or f1 > 0:
            raise NumericError(
                f"fold path does not bracket theta14 = {theta14!r} (ends at {f0 + target!r}, "
                f"{f1 + target!r})")
        for _ in range(max_iter):
            if t1 - t0 <= tol:
                break
            tm = 0.5 * (t0 + t1)
            fm = self.angle(tm) - target
            if fm == 0.0:
                return tm
            if fm > 0:
                t0, f0 = tm, fm
            else:
                t1, f1 = tm, fm
        else:
            raise NumericError(f"fold bisection did not converge in {max_iter} steps")
        # secant step inside the final bracket
        ts = t0 - f0 * (t1 - t0) / (f1 - f0)
        cands = [(abs(f0), t0), (abs(f1), t1), (abs(self.angle(ts) - target), ts)]
        return min(cands)[1]


# Reflection regimes tried in order: negating a4 maps (theta14, theta24) to
# pi minus themselves; negating a3 and a4 maps all four angles to pi minus.
REGIMES = ((), (4,), (3, 4))


def _reflect_angles(th, which):
    t13, t23, t24, t14 = th
    flip = lambda v: math.pi - v
    if 3 in which:
        t13, t23 = flip(t13), flip(t23)
    if 4 in which:
        t24, t14 = flip(t24), flip(t14)
    return t13, t23, t24, t14


def fit_vectors(target: AngleSet) -> VectorQuad:
    """Four unit vectors realizing the target angles (13), (23), (24), (14).

    Raises :class:`InfeasibleError` if the angles violate angle-form CHSH.
    """
    th = tuple(min(max(v, 0.0), math.pi) for v in target.as_tuple())
    rep = angle_chsh_report(*th)
    if not rep.ok:
        worst = max(max(-v, v - 2 * math.pi) for v in rep.values)
        raise InfeasibleError(f"angles violate angle-form CHSH by {worst:.3e}", violation=worst)
    for which in REGIMES:
        t13, t23, t24, t14 = _reflect_angles(th, which)
        path = FoldPath(t13, t23, t24)
        lo, hi = path.interval
        if lo - 1e-10 <= t14 <= hi + 1e-10:
            q = path.quad(path.solve(t14))
            # negating the same vectors again undoes the angle map
            return q.reflect(which)
    raise NumericError(f"no fold regime reaches theta14 = {th[3]!r}")


# --- Monte Carlo realization of the joint distribution ------------------------

@dataclass(frozen=True)
class McJoint:
    """Histogram estimate of the 16-entry distribution with binomial errors."""

    p: np.ndarray
    stderr: np.ndarray
    n: int

    def joint(self) -> JointDist4:
        return JointDist4(self.p)

    def correlator(self, subset) -> tuple:
        """(estimate, standard error) of the product of spins in ``subset``."""
        chi = np.prod(SPINS[:, [i - 1 for i in subset]], axis=1)
        est = float(chi @ self.p)
        return est, math.sqrt(max(1.0 - est * est, 0.0) / self.n)


def sample_sphere(rng, n) -> np.ndarray:
    """``n`` points uniform on the unit sphere (uniform cos(polar), uniform azimuth)."""
    u = rng.random((n, 2))
    cz = 2.0 * u[:, 0] - 1.0
    # float32 trig: ~1e-7 rad direction error, far below any feasible MC resolution
    phi = (2.0 * math.pi * u[:, 1]).astype(np.float32)
    sz = np.sqrt(np.maximum(1.0 - cz * cz, 0.0))
    out = np.empty((n, 3))
    out[:, 0] = np.cos(phi)
    out[:, 1] = np.sin(phi)
    out[:, :2] *= sz[:, None]
    out[:, 2] = cz
    return out


def joint_from_vectors_mc(q: VectorQuad, n: int, seed: int = 0, chunk: int = 1 << 16) -> McJoint:
    if n < 1:
        raise DomainError("sample count must be at least 1")
    rng = np.random.default_rng(seed)
    A = q.matrix().T  # (3, 4)
    counts = np.zeros(16, dtype=np.int64)
    done = 0
    while done < n:
        m = min(chunk, n - done)
        proj = sample_sphere(rng, m) @ A
        # bit set <=> spin -1; particle B carries the opposite momentum
        idx = (proj[:, 0] < 0).view(np.uint8) << 3
        idx |= (proj[:, 1] < 0).view(np.uint8) << 2
        idx |= (proj[:, 2] >= 0).view(np.uint8) << 1
        idx |= (proj[:, 3] >= 0).view(np.uint8)
        counts += np.bincount(idx, minlength=16)
        done += m
    p = counts / n
    return McJoint(p=p, stderr=np.sqrt(p * (1 - p) / n), n=n)


def merge_mc(estimates) -> McJoint:
    """Combine independent runs, weighting each by its sample count."""
    estimates = list(estimates)
    n = sum(e.n for e in estimates)
    p = sum(e.p * e.n for e in estimates) / n
    return McJoint(p=p, stderr=np.sqrt(p * (1 - p) / n), n=n)


def moments_from_vectors(q: VectorQuad) -> MomentVector:
    """Closed-form correlators of the model; E is left unset."""
    ang = angles_of(q)
    C = []
    for i, j in PAIRS:
        th = ang[f"{i}{j}"]
        cross = (i, j) in CROSS_PAIRS
        C.append(-1 + 2 * th / math.pi if cross else 1 - 2 * th / math.pi)
    return MomentVector(B=np.zeros(4), C=C, D=np.zeros(4), E=None)
