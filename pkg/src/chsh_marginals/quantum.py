"""Pair marginals generated by spin measurements on two-qubit states.

Particle A is measured along a1 or a2, particle B along a3 or a4, with the
projector ``P_s^a = (1 + s a.sigma) / 2``. Local unitaries can rotate each
party's Bloch vector onto the normal of its measurement plane, which makes all
four average spins vanish.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError
from .moments import PairMarginals

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
UNIT_TOL = 1e-12

I2 = np.eye(2, dtype=complex)
SIGMA = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)


@dataclass(frozen=True)
class TwoQubitState:
    """Density operator on A (x) B, basis |up up>, |up down>, |down up>, |down down>."""

    rho: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex)
        if rho.shape != (4, 4):
            raise ValidationError(f"density matrix must be 4x4, got {rho.shape}")
        if np.abs(rho - rho.conj().T).max() > HERMITIAN_TOL:
            raise ValidationError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1) > TRACE_TOL:
            raise ValidationError(f"density matrix has trace {np.trace(rho).real!r}")
        lo = np.linalg.eigvalsh(rho).min()
        if lo < -PSD_TOL:
            raise ValidationError(f"density matrix has negative eigenvalue {lo:.3e}")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_vector(cls, psi) -> "TwoQubitState":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    @property
    def spectrum(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.rho)


def singlet() -> TwoQubitState:
    return TwoQubitState.from_vector([0, 1, -1, 0])


def maximally_mixed() -> TwoQubitState:
    return TwoQubitState(np.eye(4) / 4)


def qubit_state(bloch) -> np.ndarray:
    """2x2 density matrix (1 + b.sigma)/2 for a Bloch vector with |b| <= 1."""
    b = np.asarray(bloch, dtype=float)
    return (I2 + np.tensordot(b, SIGMA, axes=1)) / 2


def product_state(bloch_a, bloch_b) -> TwoQubitState:
    return TwoQubitState(np.kron(qubit_state(bloch_a), qubit_state(bloch_b)))


def _direction(a, name="direction"):
    a = np.asarray(a, dtype=float).reshape(-1)
    if a.shape != (3,) or abs(np.linalg.norm(a) - 1) > UNIT_TOL:
        raise DomainError(f"{name} must be a unit 3-vector, got {a.tolist()}")
    return a


def planar_direction(degrees) -> np.ndarray:
    """Unit vector in the xy plane at the given angle from the x axis."""
    t = math.radians(degrees)
    return np.array([math.cos(t), math.sin(t), 0.0])


@dataclass(frozen=True)
class MeasurementSetup:
    a1: np.ndarray
    a2: np.ndarray
    a3: np.ndarray
    a4: np.ndarray

    def __post_init__(self):
        for name in ("a1", "a2", "a3", "a4"):
            object.__setattr__(self, name, _direction(getattr(self, name), name))

    @classmethod
    def planar(cls, d1, d2, d3, d4) -> "MeasurementSetup":
        """Directions in the xy plane given as angles in degrees."""
        return cls(*(planar_direction(d) for d in (d1, d2, d3, d4)))

    def direction(self, k) -> np.ndarray:
        return getattr(self, f"a{k}")


def projector(a, s) -> np.ndarray:
    return (I2 + s * np.tensordot(a, SIGMA, axes=1)) / 2


def pair_probs(state: TwoQubitState, aA, aB) -> np.ndarray:
    """2x2 table of p(sA, sB); rows sA = +, -, columns sB = +, -."""
    aA, aB = _direction(aA, "aA"), _direction(aB, "aB")
    t = np.empty((2, 2))
    for i, sa in enumerate((1, -1)):
        for j, sb in enumerate((1, -1)):
            val = np.trace(state.rho @ np.kron(projector(aA, sa), projector(aB, sb)))
            if abs(val.imag) > 1e-12:
                raise ValidationError(f"probability has imaginary part {val.imag:.3e}")
            t[i, j] = val.real
    return t


def eprb_marginals(state: TwoQubitState, setup: MeasurementSetup) -> PairMarginals:
    return PairMarginals(*(pair_probs(state, setup.direction(i), setup.direction(j))
                           for i, j in ((1, 3), (1, 4), (2, 3), (2, 4))))


def bloch_vectors(state: TwoQubitState):
    """Local Bloch vectors (<sigma_k (x) 1>, <1 (x) sigma_k>)."""
    bA = np.array([np.trace(state.rho @ np.kron(s, I2)).real for s in SIGMA])
    bB = np.array([np.trace(state.rho @ np.kron(I2, s)).real for s in SIGMA])
    return bA, bB


def average_spins(state: TwoQubitState, setup: MeasurementSetup) -> np.ndarray:
    """<a_k . sigma> on the relevant particle for k = 1..4."""
    bA, bB = bloch_vectors(state)
    return np.array([setup.a1 @ bA, setup.a2 @ bA, setup.a3 @ bB, setup.a4 @ bB])


def _orthogonal_axis(v):
    # unit vector orthogonal to v, built from the coordinate axis least aligned with it
    e = np.zeros(3)
    e[int(np.argmin(np.abs(v)))] = 1.0
    w = np.cross(v, e)
    return w / np.linalg.norm(w)


def plane_normal(u, v) -> np.ndarray:
    n = np.cross(u, v)
    norm = np.linalg.norm(n)
    if norm < 1e-12:
        return _orthogonal_axis(u)
    return n / norm


def rotation_unitary(src, dst) -> np.ndarray:
    """SU(2) element whose adjoint action rotates direction ``src`` onto ``dst``."""
    a = np.asarray(src, dtype=float)
    b = np.asarray(dst, dtype=float)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    axis = np.cross(a, b)
    s = np.linalg.norm(axis)
    c = float(np.clip(a @ b, -1.0, 1.0))
    if s < 1e-12:
        if c > 0:
            return I2.copy()
        axis = _orthogonal_axis(a)
    else:
        axis = axis / s
    angle = math.atan2(s, c)
    return math.cos(angle / 2) * I2 - 1j * math.sin(angle / 2) * np.tensordot(axis, SIGMA, axes=1)


def _local_unitary(bloch, normal):
    if np.linalg.norm(bloch) < 1e-14:
        return I2.copy()
    # either normal orientation zeroes both averages; take the nearer one
    if bloch @ normal < 0:
        normal = -normal
    return rotation_unitary(bloch, normal)


def zero_mean_rotation(state: TwoQubitState, setup: MeasurementSetup) -> TwoQubitState:
    """Apply local rotations making all four average spins vanish."""
    bA, bB = bloch_vectors(state)
    UA = _local_unitary(bA, plane_normal(setup.a1, setup.a2))
    UB = _local_unitary(bB, plane_normal(setup.a3, setup.a4))
    U = np.kron(UA, UB)
    rho = U @ state.rho @ U.conj().T
    return TwoQubitState((rho + rho.conj().T) / 2)


def random_state(rng, rank=None) -> TwoQubitState:
    """Random mixed state rho = G G^dagger / tr(...) with complex Gaussian G."""
    k = rank or 4
    G = rng.normal(size=(4, k)) + 1j * rng.normal(size=(4, k))
    rho = G @ G.conj().T
    return TwoQubitState(rho / np.trace(rho).real)


def random_direction(rng) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)
