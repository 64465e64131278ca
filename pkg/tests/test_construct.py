import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chsh_marginals.construct import (bell_d_interval, bell_moments_from_tables, chsh_moments,
                                      construct_from_marginals, construct_joint_bell,
                                      construct_joint_chsh, feasible_intervals, sum_diff_intervals)
from chsh_marginals.errors import DomainError, InfeasibleError, UnsupportedError
from chsh_marginals.inequalities import bell_report, chsh_report, marginal_positivity_report
from chsh_marginals.lp_oracle import lp_feasible, lp_feasible_bell
from chsh_marginals.moments import (CONFIGS, JointDist4, PairMarginals, config_index,
                                    fixed_moments_from_marginals, pair_table)

from conftest import brute_expectation

unit = st.floats(-1, 1, allow_nan=False)


def chsh_points(rng, n):
    out = []
    while len(out) < n:
        c = rng.uniform(-1, 1, 4)
        if chsh_report(*c).ok:
            out.append(c)
    return out


def test_origin_intervals():
    fi = feasible_intervals(0, 0, 0, 0)
    assert fi.G == (0, 0, 0, 0)
    assert fi.E_interval == (-1, 1) and fi.E == 0
    assert fi.sum_interval == (-1, 1) and fi.diff_interval == (-1, 1)


def test_forced_boundary_intervals():
    fi = feasible_intervals(1, 1, 1, 1)
    assert fi.G == (4, 0, 0, 0)
    assert fi.E_interval == (1, 1) and fi.E == 1
    assert fi.sum_interval == (2, 2) and fi.diff_interval == (0, 0)


def test_pr_box_infeasible_with_violation():
    with pytest.raises(InfeasibleError) as info:
        feasible_intervals(1, 1, 1, -1)
    assert info.value.violation == pytest.approx(4)
    assert not lp_feasible(PairMarginals.from_moments(np.zeros(4), [1, 1, 1, -1])).feasible


def test_origin_gives_uniform():
    np.testing.assert_array_equal(construct_joint_chsh(0, 0, 0, 0).p, 1 / 16)


def test_all_ones_gives_two_atoms():
    p = construct_joint_chsh(1, 1, 1, 1).p
    expect = np.zeros(16)
    expect[config_index((1, 1, 1, 1))] = expect[config_index((-1, -1, -1, -1))] = 0.5
    assert np.abs(p - expect).max() <= 1e-12


def test_half_point_checked_by_lp_and_brute_sum():
    d = construct_joint_chsh(0.5, 0.5, 0.5, -0.5)
    assert d.min_entry >= 0
    for sub, want in (((1, 3), .5), ((1, 4), .5), ((2, 3), .5), ((2, 4), -.5)):
        assert brute_expectation(d.p, sub) == pytest.approx(want, abs=1e-12)
    assert lp_feasible(PairMarginals.from_joint(d)).feasible


def test_sufficiency_property(rng):
    for c in chsh_points(rng, 10_000):
        d = construct_joint_chsh(*c)
        assert d.min_entry >= -1e-12
        assert abs(d.total - 1) <= 1e-12
        for k, sub in enumerate(((1, 3), (1, 4), (2, 3), (2, 4))):
            assert abs(brute_expectation(d.p, sub) - c[k]) <= 1e-12
        for sub in ((1,), (2,), (3,), (4,), (1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)):
            assert abs(brute_expectation(d.p, sub)) <= 1e-12


def test_central_symmetry_exact(rng):
    for c in chsh_points(rng, 500):
        p = construct_joint_chsh(*c).p
        for s in CONFIGS:
            assert p[config_index(s)] == p[config_index(tuple(-v for v in s))]


def test_any_E_in_interval_works(rng):
    for c in chsh_points(rng, 500):
        lo, hi = feasible_intervals(*c).E_interval
        for E in (lo, (lo + hi) / 2, hi):
            s_int, d_int = sum_diff_intervals(feasible_intervals(*c).G, E)
            assert s_int[0] <= s_int[1] + 1e-12 and d_int[0] <= d_int[1] + 1e-12
            d = construct_joint_chsh(*c, E=E)
            assert d.min_entry >= -1e-12
            assert brute_expectation(d.p, (1, 2, 3, 4)) == pytest.approx(E, abs=1e-12)


def test_E_outside_interval_rejected():
    with pytest.raises(DomainError):
        construct_joint_chsh(1, 1, 1, 1, E=0.5)


def test_agreement_with_lp(rng):
    for _ in range(3000):
        c = rng.uniform(-1, 1, 4)
        try:
            construct_joint_chsh(*c)
            built = True
        except InfeasibleError:
            built = False
        assert built == lp_feasible(PairMarginals.from_moments(np.zeros(4), c)).feasible


@settings(max_examples=300, deadline=None)
@given(unit, unit, unit, unit)
def test_report_iff_construct(a, b, c, d):
    ok = chsh_report(a, b, c, d).ok
    try:
        construct_joint_chsh(a, b, c, d)
        assert ok
    except InfeasibleError:
        assert not ok


def test_chsh_moments_fill_free_correlators():
    m = chsh_moments(1, 1, 1, 1)
    assert m.pair(1, 2) == 1 and m.pair(3, 4) == 1 and m.E == 1


def test_from_marginals_requires_zero_means():
    pm = PairMarginals.from_moments([0.3, 0.1, -0.2, 0.4], [0.2, 0.1, 0.0, 0.3])
    with pytest.raises(UnsupportedError, match="LP"):
        construct_from_marginals(pm)
    assert lp_feasible(pm).feasible
    d = construct_from_marginals(PairMarginals.from_moments(np.zeros(4), [.1, .2, .3, .4]))
    assert brute_expectation(d.p, (2, 4)) == pytest.approx(0.4, abs=1e-12)


# --- Bell case ---------------------------------------------------------------

BELL = list(itertools.product((1, -1), repeat=3))


def bell_brute(p, sub):
    return sum(math.prod(s[i - 1] for i in sub) * w for s, w in zip(BELL, p))


def test_bell_uniform():
    bj = construct_joint_bell(0, 0, 0, 0, 0, 0)
    assert bj.D_interval == (-1, 1) and bj.D == 0
    np.testing.assert_array_equal(bj.p, 1 / 8)


def test_bell_all_correlated():
    bj = construct_joint_bell(0, 0, 0, 1, 1, 1)
    assert bj.D_interval == (0, 0) and bj.D == 0
    assert bj.p[0] == 0.5 and bj.p[7] == 0.5 and bj.p[1:7].sum() == 0


def test_bell_all_anticorrelated_infeasible():
    with pytest.raises(InfeasibleError):
        construct_joint_bell(0, 0, 0, -1, -1, -1)


def random_bell_inputs(rng, n):
    out = []
    while len(out) < n:
        B = rng.uniform(-1, 1, 3)
        C = rng.uniform(-1, 1, 3)
        pos = all(marginal_positivity_report(B[i], B[j], C[k]).ok
                  for k, (i, j) in enumerate(((0, 1), (0, 2), (1, 2))))
        if pos and bell_report(*C).ok:
            out.append((B, C))
    return out


def test_bell_sufficiency(rng):
    for B, C in random_bell_inputs(rng, 10_000):
        bj = construct_joint_bell(*B, *C)
        assert bj.p.min() >= 0
        assert abs(bj.p.sum() - 1) <= 1e-12
        got = [bell_brute(bj.p, s) for s in ((1,), (2,), (3,), (1, 2), (1, 3), (2, 3))]
        assert np.abs(np.array(got) - np.r_[B, C]).max() <= 1e-12


def test_bell_agrees_with_lp(rng):
    for _ in range(3000):
        B = rng.uniform(-1, 1, 3)
        C = rng.uniform(-1, 1, 3)
        tabs = [pair_table(B[i], B[j], C[k]) for k, (i, j) in enumerate(((0, 1), (0, 2), (1, 2)))]
        if min(t.min() for t in tabs) < 0:
            continue
        try:
            construct_joint_bell(*B, *C)
            built = True
        except InfeasibleError:
            built = False
        assert built == lp_feasible_bell(*tabs).feasible


def test_bell_moments_from_tables():
    B, C = (0.2, -0.1, 0.3), (0.5, 0.5, 0.4)
    tabs = {(1, 2): pair_table(B[0], B[1], C[0]), (1, 3): pair_table(B[0], B[2], C[1]),
            (2, 3): pair_table(B[1], B[2], C[2])}
    np.testing.assert_allclose(bell_moments_from_tables(tabs), B + C, atol=1e-15)
    bj = construct_joint_bell(*bell_moments_from_tables(tabs))
    for ij, t in tabs.items():
        np.testing.assert_allclose(bj.pair_table(*ij), t, atol=1e-15)
    lo, hi = bell_d_interval(*B, *C)
    assert lo <= bj.D <= hi


def test_construct_output_rederived_from_marginals(rng):
    for c in chsh_points(rng, 200):
        B, C = fixed_moments_from_marginals(PairMarginals.from_joint(construct_joint_chsh(*c)))
        assert np.abs(B).max() <= 1e-12 and np.abs(C - c).max() <= 1e-12
        assert isinstance(construct_joint_chsh(*c), JointDist4)
