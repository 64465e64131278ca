import math

import numpy as np
import pytest

from chsh_marginals.errors import DomainError, InfeasibleError
from chsh_marginals.inequalities import angle_chsh_report, chsh_report
from chsh_marginals.peres import (AngleSet, FoldPath, VectorQuad, angle_between, angle_from_corr,
                                  angles_of, corr_from_angle, fit_vectors, joint_from_vectors_mc,
                                  merge_mc, moments_from_vectors, reachable_interval, sample_sphere)

PI = math.pi
X, Y, Z = np.eye(3)


def random_angle_set(rng):
    while True:
        th = rng.uniform(0, PI, 4)
        if angle_chsh_report(*th).ok:
            return AngleSet(*th)


def random_quad(rng):
    v = rng.normal(size=(4, 3))
    return VectorQuad.normalized(*v)


def check_fit(target, tol=1e-9):
    q = fit_vectors(target)
    got = angles_of(q)
    for key, want in zip(("13", "23", "24", "14"), target.as_tuple()):
        assert abs(got[key] - want) <= tol, (key, got[key], want)
    return q, got


def test_angle_correlation_conversion():
    assert corr_from_angle(PI / 2) == 0
    assert corr_from_angle(0) == -1
    assert angle_from_corr(1) == PI
    for c in np.linspace(-1, 1, 41):
        assert corr_from_angle(angle_from_corr(c)) == pytest.approx(c, abs=1e-15)
    with pytest.raises(DomainError):
        corr_from_angle(4.0)
    with pytest.raises(DomainError):
        angle_from_corr(-1.5)


def test_angles_of_basic():
    assert angles_of(VectorQuad(X, Y, X, Z))["13"] == 0
    assert angles_of(VectorQuad(X, Y, Z, Z))["13"] == pytest.approx(PI / 2)
    with pytest.raises(DomainError):
        VectorQuad(2 * X, Y, Z, X)


def test_planar_chain_maximum():
    t = PI / 3
    q, got = check_fit(AngleSet(t, t, t, PI))
    assert abs(np.linalg.det(q.matrix()[[0, 1, 2]])) <= 1e-9  # coplanar
    assert got["12"] == pytest.approx(2 * PI / 3, abs=1e-9)
    assert got["34"] == pytest.approx(2 * PI / 3, abs=1e-9)


def test_full_fold_minimum():
    q, got = check_fit(AngleSet(PI / 6, 2 * PI / 3, PI / 6, PI / 3))
    assert got["14"] == pytest.approx(2 * PI / 3 - PI / 6 - PI / 6, abs=1e-9)


def test_all_right_angles():
    check_fit(AngleSet(PI / 2, PI / 2, PI / 2, PI / 2))


def test_fit_round_trip_1e3(rng):
    for _ in range(1000):
        check_fit(random_angle_set(rng))


def test_fit_edge_angles():
    for th in [(0, 0, 0, 0), (PI, PI, PI, PI), (0, PI, 0, PI), (PI, 0, PI, 0), (0, 0, PI, PI),
               (PI / 2, 0, 0, PI / 2), (PI, PI / 2, PI / 2, 0)]:
        if angle_chsh_report(*th).ok:
            check_fit(AngleSet(*th))


def test_fit_rejects_violation():
    with pytest.raises(InfeasibleError):
        fit_vectors(AngleSet(0, 0, 0, PI))


def test_reachable_interval_matches_sampling(rng):
    for _ in range(200):
        th = rng.uniform(0, PI, 3)
        lo, hi = reachable_interval(*th)
        path = FoldPath(*th)
        if lo > hi:
            continue
        phis = rng.uniform(-PI, PI, size=(300, 2))
        seen = [angle_between(path.a1(a), path.a4(b)) for a, b in phis]
        assert min(seen) >= lo - 1e-9 and max(seen) <= hi + 1e-9
        assert path.angle(0) == pytest.approx(hi, abs=1e-9)
        assert path.angle(1) == pytest.approx(lo, abs=1e-9)


def test_reachable_interval_is_angle_chsh(rng):
    for _ in range(2000):
        t13, t23, t24, t14 = rng.uniform(0, PI, 4)
        lo, hi = reachable_interval(t13, t23, t24)
        inside = lo - 1e-12 <= t14 <= hi + 1e-12
        assert inside == angle_chsh_report(t13, t23, t24, t14, tol=1e-12).ok


def test_fold_path_continuity(rng):
    for _ in range(100):
        th = rng.uniform(0, PI, 3)
        path = FoldPath(*th)
        ts = np.linspace(0, 1, 100)
        angles = [path.angle(t) for t in ts]
        az = np.array([path.azimuths(t) for t in ts])
        steps = np.abs(np.diff(az, axis=0)).sum(axis=1)
        # angle(a1, a4) is 1-Lipschitz in each vector, which moves by at most its azimuth change
        assert np.all(np.abs(np.diff(angles)) <= steps + 1e-12)


def test_aligned_vectors_mc():
    mc = joint_from_vectors_mc(VectorQuad(Z, Z, Z, Z), 20_000, seed=1)
    # (+,+,-,-) is index 3 and (-,-,+,+) index 12
    assert mc.p[[3, 12]].sum() == 1
    assert mc.p[3] == pytest.approx(0.5, abs=0.02)


def test_mc_matches_closed_form(rng):
    q = random_quad(rng)
    mc = joint_from_vectors_mc(q, 1_000_000, seed=7)
    exact = moments_from_vectors(q)
    for i, j in ((1, 3), (1, 4), (2, 3), (2, 4), (1, 2), (3, 4)):
        est, se = mc.correlator((i, j))
        assert abs(est - exact.pair(i, j)) <= 4 * se
    ang = angles_of(q)
    assert exact.pair(1, 3) == pytest.approx(-1 + 2 * ang["13"] / PI)
    assert exact.pair(1, 2) == pytest.approx(1 - 2 * ang["12"] / PI)


def test_closed_form_examples():
    m = moments_from_vectors(VectorQuad(X, Y, Z, Z))
    assert m.pair(1, 3) == pytest.approx(0, abs=1e-15)
    assert m.pair(3, 4) == 1
    assert m.E is None


def test_mc_is_normalized_and_deterministic(rng):
    q = random_quad(rng)
    a = joint_from_vectors_mc(q, 100_000, seed=3)
    b = joint_from_vectors_mc(q, 100_000, seed=3)
    assert a.p.tobytes() == b.p.tobytes()
    assert a.p.min() >= 0 and a.p.sum() == pytest.approx(1, abs=1e-15)
    merged = merge_mc([a, joint_from_vectors_mc(q, 50_000, seed=4)])
    assert merged.n == 150_000 and merged.p.sum() == pytest.approx(1, abs=1e-15)
    with pytest.raises(DomainError):
        joint_from_vectors_mc(q, 0)


def test_sphere_sampler_moments():
    v = sample_sphere(np.random.default_rng(0), 400_000)
    np.testing.assert_allclose(np.linalg.norm(v, axis=1), 1, atol=1e-6)
    np.testing.assert_allclose(v.mean(axis=0), 0, atol=5e-3)
    np.testing.assert_allclose(v.T @ v / len(v), np.eye(3) / 3, atol=5e-3)


def test_proof_path_from_correlators(rng):
    done = 0
    while done < 10:
        c = rng.uniform(-1, 1, 4)
        if not chsh_report(*c).ok:
            continue
        done += 1
        q = fit_vectors(AngleSet.from_correlators(*c))
        mc = joint_from_vectors_mc(q, 200_000, seed=done)
        for k, ij in enumerate(((1, 3), (1, 4), (2, 3), (2, 4))):
            est, se = mc.correlator(ij)
            assert abs(est - c[k]) <= 5 * se + 1e-9


def test_reflect_flips_vectors():
    q = VectorQuad(X, Y, Z, X)
    r = q.reflect((3, 4))
    np.testing.assert_array_equal(r.a3, -Z)
    np.testing.assert_array_equal(r.a4, -X)
    np.testing.assert_array_equal(r.a1, X)
