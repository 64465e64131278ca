import math

import numpy as np
import pytest

from chsh_marginals.errors import DomainError, ValidationError
from chsh_marginals.inequalities import chsh_report
from chsh_marginals.lp_oracle import lp_feasible
from chsh_marginals.moments import fixed_moments_from_marginals
from chsh_marginals.quantum import (MeasurementSetup, TwoQubitState, average_spins, bloch_vectors,
                                    eprb_marginals, maximally_mixed, pair_probs, plane_normal,
                                    product_state, random_direction, random_state,
                                    rotation_unitary, singlet, zero_mean_rotation)

X, Y, Z = np.eye(3)

# Hand-written 4x4 matrices for the oracle, independent of the module's kron products.
SX = np.array([[0, 1], [1, 0]], complex)
SY = np.array([[0, -1j], [1j, 0]], complex)
SZ = np.array([[1, 0], [0, -1]], complex)


def direct_prob(rho, a, b, sa, sb):
    pa = (np.eye(2) + sa * (a[0] * SX + a[1] * SY + a[2] * SZ)) / 2
    pb = (np.eye(2) + sb * (b[0] * SX + b[1] * SY + b[2] * SZ)) / 2
    P = np.einsum("ij,kl->ikjl", pa, pb).reshape(4, 4)
    return float(np.trace(rho @ P).real)


def test_singlet_parallel():
    t = pair_probs(singlet(), Z, Z)
    np.testing.assert_allclose(t, [[0, 0.5], [0.5, 0]], atol=1e-15)


def test_singlet_perpendicular():
    np.testing.assert_allclose(pair_probs(singlet(), X, Y), 0.25, atol=1e-15)


def test_mixed_uniform(rng):
    for _ in range(10):
        np.testing.assert_allclose(
            pair_probs(maximally_mixed(), random_direction(rng), random_direction(rng)), 0.25,
            atol=1e-15)


def test_singlet_closed_form(rng):
    rho = singlet().rho
    for _ in range(200):
        a, b = random_direction(rng), random_direction(rng)
        t = pair_probs(singlet(), a, b)
        for i, sa in enumerate((1, -1)):
            for j, sb in enumerate((1, -1)):
                assert t[i, j] == pytest.approx((1 - sa * sb * a @ b) / 4, abs=1e-12)
                assert t[i, j] == pytest.approx(direct_prob(rho, a, b, sa, sb), abs=1e-12)
        C = t[0, 0] - t[0, 1] - t[1, 0] + t[1, 1]
        assert C == pytest.approx(-a @ b, abs=1e-12)


def test_random_states_give_valid_tables(rng):
    for _ in range(200):
        st = random_state(rng, rank=int(rng.integers(1, 5)))
        setup = MeasurementSetup(*(random_direction(rng) for _ in range(4)))
        pm = eprb_marginals(st, setup)
        for t in pm.tables().values():
            assert t.min() >= -1e-12 and abs(t.sum() - 1) <= 1e-12
        pm.validate()  # no-signalling: single-spin marginals agree across tables


def test_singlet_equal_directions():
    _, C = fixed_moments_from_marginals(eprb_marginals(singlet(), MeasurementSetup(Z, Z, Z, Z)))
    np.testing.assert_allclose(C, -1, atol=1e-12)


def test_tsirelson():
    pm = eprb_marginals(singlet(), MeasurementSetup.planar(0, 90, 45, 135))
    _, C = fixed_moments_from_marginals(pm)
    r = chsh_report(*C)
    assert r.max_abs == pytest.approx(2 * math.sqrt(2), abs=1e-12)
    assert not r.ok
    assert not lp_feasible(pm).feasible


def test_mixed_is_feasible():
    assert lp_feasible(eprb_marginals(maximally_mixed(), MeasurementSetup.planar(0, 10, 20, 30))).feasible


def test_state_validation():
    with pytest.raises(ValidationError):
        TwoQubitState(np.eye(4))
    with pytest.raises(ValidationError):
        TwoQubitState(np.diag([1.5, -0.5, 0, 0]))
    bad = np.eye(4, dtype=complex) / 4
    bad[0, 1] = 0.1j
    with pytest.raises(ValidationError):
        TwoQubitState(bad)
    with pytest.raises(DomainError):
        MeasurementSetup(2 * X, Y, Z, X)


def test_singlet_unchanged_by_rotation():
    setup = MeasurementSetup.planar(0, 90, 45, 135)
    np.testing.assert_allclose(zero_mean_rotation(singlet(), setup).rho, singlet().rho, atol=1e-15)


def test_product_up_up():
    st = product_state(Z, Z)
    setup = MeasurementSetup(X, Y, X, (X + Y) / math.sqrt(2))
    rotated = zero_mean_rotation(st, setup)
    t = pair_probs(rotated, X, X)
    assert t[0].sum() - t[1].sum() == pytest.approx(0, abs=1e-12)
    t = pair_probs(rotated, Y, X)
    assert t[0].sum() - t[1].sum() == pytest.approx(0, abs=1e-12)


def test_random_zero_mean(rng):
    for _ in range(200):
        st = random_state(rng)
        setup = MeasurementSetup(*(random_direction(rng) for _ in range(4)))
        out = zero_mean_rotation(st, setup)
        assert np.abs(average_spins(out, setup)).max() <= 1e-10
        np.testing.assert_allclose(out.spectrum, st.spectrum, atol=1e-10)
        assert np.abs(out.rho - out.rho.conj().T).max() <= 1e-12


def test_rotation_unitary_maps_direction(rng):
    for _ in range(100):
        a, b = random_direction(rng), random_direction(rng)
        U = rotation_unitary(a, b)
        bl = bloch_vectors(TwoQubitState(np.kron(U @ ((np.eye(2) + a[0] * SX + a[1] * SY + a[2] * SZ) / 2)
                                                   @ U.conj().T, np.eye(2) / 2)))[0]
        np.testing.assert_allclose(bl, b, atol=1e-12)
    U = rotation_unitary(Z, -Z)
    np.testing.assert_allclose(np.abs(U.conj().T @ U), np.eye(2), atol=1e-15)


def test_plane_normal():
    np.testing.assert_allclose(plane_normal(X, Y), Z)
    n = plane_normal(X, X)
    assert abs(n @ X) <= 1e-15 and abs(np.linalg.norm(n) - 1) <= 1e-15
