from fractions import Fraction as Q

import pytest
from hypothesis import given, settings, strategies as st

from lipconj.gap_example import window_map, windowed_conjugate
from lipconj.markov_chain import FiniteStructure, MarkovSystem, build_transition, refine
from lipconj.markov_conjugator import (build_conjugate, cylinder_diameter_decay, delta_psi,
                                       identity_checks, lambda_ratios, lipschitz_checks,
                                       psi_on_refinement, round_trip)
from lipconj.pwl_map import IteratedVariation, PwlMap, check_conjugacy, tent_map, two_lap_map
from lipconj.subeigen import pruitt_exact

FA_SYS = MarkovSystem(two_lap_map(), (0, Q(3, 5), 1))
TENT_SYS = MarkovSystem(tent_map(), (0, Q(1, 2), 1))
FULL = FiniteStructure(None, [[1, 1], [1, 1]])
HALF = [Q(1, 2), Q(1, 2)]


def test_lambda_ratio_examples():
    assert lambda_ratios(FULL, HALF) == [2, 2]
    assert lambda_ratios(FULL, [Q(1, 3), Q(2, 3)]) == [3, Q(3, 2)]
    with pytest.raises(ValueError):
        lambda_ratios(FULL, [1, 0])


def test_psi_tent_is_identity_on_dyadics():
    psi = psi_on_refinement(TENT_SYS, HALF, 2)
    assert psi.xs == tuple(Q(k, 8) for k in range(9))
    assert psi.xs == psi.ys


def test_psi_fa_depth_one():
    psi = psi_on_refinement(FA_SYS, HALF, 1)
    assert psi(Q(3, 5)) == Q(1, 2) and psi(Q(9, 25)) == Q(1, 4)


def test_psi_fa_depth_six_equal_increments():
    # depth 6 means words of 7 symbols: 2^7 cylinders of mass 2^-7
    psi = psi_on_refinement(FA_SYS, HALF, 6)
    steps = {b - a for a, b in zip(psi.ys, psi.ys[1:])}
    assert steps == {Q(1, 2**7)} and len(psi) == 2**7 + 1


def test_psi_total_mass_is_one():
    for n in range(4):
        psi = psi_on_refinement(TENT_SYS, [Q(1, 3), Q(2, 3)], n)
        assert psi(0) == 0 and psi(1) == 1


def test_psi_rescales_unnormalized_vector():
    assert psi_on_refinement(FA_SYS, [3, 3], 2) == psi_on_refinement(FA_SYS, HALF, 2)


def test_build_conjugate_fa_is_tent():
    g = build_conjugate(FA_SYS, HALF)
    assert g.breakpoints == tent_map().breakpoints and g.values == tent_map().values
    assert g.lipschitz_constant() == 2


def test_build_conjugate_tent_is_tent():
    assert build_conjugate(TENT_SYS, HALF) == tent_map()


def test_build_conjugate_slopes_equal_lambda_ratios():
    v = [Q(1, 3), Q(2, 3)]
    g = build_conjugate(TENT_SYS, v)
    assert [abs(s) for s in g.slopes] == lambda_ratios(TENT_SYS, v)


def test_conjugacy_residual_depth_10_grid():
    g = build_conjugate(FA_SYS, HALF)
    psi = psi_on_refinement(FA_SYS, HALF, 10)
    assert check_conjugacy(FA_SYS.map, g, psi, [float(x) for x in psi.xs]) < 1e-9
    assert all(g(psi(x)) == psi(FA_SYS.map(x)) for x in psi.xs)


def test_identity_checks():
    assert identity_checks(FA_SYS, HALF, 4).ok
    assert identity_checks(FA_SYS, HALF, 6).ok
    assert identity_checks(TENT_SYS, [Q(1, 3), Q(2, 3)], 6).ok
    rep = identity_checks(FA_SYS, HALF, 4, table={(0, 1): Q(1, 3)})
    assert not rep.ok and (0,) in rep.additivity_failures


def test_delta_psi_matches_cylinder_images():
    v = [Q(1, 3), Q(2, 3)]
    lam = lambda_ratios(TENT_SYS, v)
    psi = psi_on_refinement(TENT_SYS, v, 3)
    for c in refine(TENT_SYS, 3):
        assert psi(c.right) - psi(c.left) == delta_psi(c.word, v, lam)


def test_lipschitz_and_expansion_checks():
    assert lipschitz_checks(FA_SYS, HALF, 3) == {"bound": True, "expansion": True, "points": 17}
    assert lipschitz_checks(TENT_SYS, [Q(1, 3), Q(2, 3)], 3)["bound"]
    assert not lipschitz_checks(TENT_SYS, [Q(1, 3), Q(2, 3)], 3, lam=2)["bound"]


def test_cylinder_decay():
    assert cylinder_diameter_decay(TENT_SYS, HALF, 6).max_delta == [Q(1, 2 ** (n + 1)) for n in range(7)]
    assert cylinder_diameter_decay(FA_SYS, HALF, 6).max_delta == [Q(1, 2 ** (n + 1)) for n in range(7)]
    rep = cylinder_diameter_decay(TENT_SYS, [Q(1, 3), Q(2, 3)], 8)
    assert rep.strictly_decreasing and rep.max_delta[0] == Q(2, 3)
    # brute force over explicit cylinders
    v = [Q(1, 3), Q(2, 3)]
    lam = lambda_ratios(TENT_SYS, v)
    for n in range(5):
        assert rep.max_delta[n] == max(delta_psi(c.word, v, lam) for c in refine(TENT_SYS, n))


def test_round_trip():
    rt = round_trip(FA_SYS, HALF)
    assert rt.equal and rt.subeigen_ok and rt.v_prime == HALF
    rt = round_trip(TENT_SYS, [1, 2])
    assert rt.equal and rt.v_prime == [Q(1, 3), Q(2, 3)]


@st.composite
def full_branch_systems(draw):
    k = draw(st.integers(2, 4))
    cuts = sorted(set(draw(st.lists(st.integers(1, 9), min_size=k - 1, max_size=k - 1))))
    xs = [Q(0)] + [Q(c, 10) for c in cuts] + [Q(1)]
    f = PwlMap(xs, [Q(i % 2) for i in range(len(xs))])
    v = [Q(draw(st.integers(1, 6))) for _ in range(len(xs) - 1)]
    return MarkovSystem(f, xs), v


@settings(max_examples=25, deadline=None)
@given(full_branch_systems())
def test_random_full_branch_systems(case):
    ms, v = case
    g = build_conjugate(ms, v)
    lam = lambda_ratios(ms, v)
    assert g.lipschitz_constant() == max(lam)
    assert identity_checks(ms, v, 3).ok
    rt = round_trip(ms, v, g)
    assert rt.equal and rt.subeigen_ok
    var = IteratedVariation(g)
    assert all(var.total(n) <= g.lipschitz_constant() ** n for n in range(1, 7))


def test_window_map_transition_is_truncated_gamma():
    from lipconj.gap_example import build_example
    gamma = build_example()["gamma"]
    R = 3
    ts = build_transition(window_map(R))
    assert ts.matrix == gamma.truncate(-R, R).matrix


def test_windowed_gap_conjugate():
    wc = windowed_conjugate(R=6)
    assert wc.lip <= 6
    assert all(s == 6 for k, s in enumerate(wc.slopes) if k != 2 * wc.R)
    assert wc.anchor_slope < 6
    assert max(abs(s) for s in wc.g.slopes) <= 6


def test_windowed_gap_conjugate_default_window_mass():
    wc = windowed_conjugate()
    assert wc.outside_mass <= 1e-6 and wc.lip == 6
