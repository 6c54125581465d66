import json
import math
from fractions import Fraction as Q

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lipconj.errors import MarkovError, ResourceLimitError
from lipconj.gap_example import GENERIC_X, build_example, gamma_prime, lift
from lipconj.markov_chain import (BandedStructure, FiniteStructure, MarkovSystem, build_transition,
                                  convolution_identity_check, entropy_estimates, parse_state,
                                  path_counts, refine, structure_from_json, taboo_counts,
                                  taboo_vectors)
from lipconj.pwl_map import PeriodicLift, PwlMap, iterate, preimages, tent_map, two_lap_map

from oracles import dfs_paths, enumerate_paths

GP = gamma_prime()
FULL = FiniteStructure(None, [[1, 1], [1, 1]])
FA_SYS = MarkovSystem(two_lap_map(), (0, Q(3, 5), 1))
TENT_SYS = MarkovSystem(tent_map(), (0, Q(1, 2), 1))


# --- structures ------------------------------------------------------------------

def test_build_transition_examples():
    assert build_transition(TENT_SYS).matrix == ((1, 1), (1, 1))
    assert build_transition(FA_SYS).matrix == ((1, 1), (1, 1))
    gamma = build_example()["gamma"]
    assert gamma.out_degree(0) == 6 and gamma.out_degree(1) == 4


def test_gamma_covering_relations_by_brute_force():
    # I_n -> (n - 1, n + 2), J_n -> (n, n + 2): compare with sampled images of the lift
    F = lift()
    gamma = build_example()["gamma"]
    ivs = {(c, 0): (Q(c), c + Q(3, 5)) for c in range(-3, 4)}
    ivs.update({(c, 1): (c + Q(3, 5), Q(c + 1)) for c in range(-3, 4)})
    for src in [(0, 0), (0, 1)]:
        a, b = ivs[src]
        pts = [a + (b - a) * Q(k, 400) for k in range(1, 400)]
        img = {F(x) for x in pts}
        lo, hi = min(img), max(img)
        hits = {t for t, (u, v) in ivs.items() if lo < (u + v) / 2 < hi}
        assert hits == {t for t, _m in gamma.successors(src)}


def test_non_markov_partition_raises():
    with pytest.raises(MarkovError):
        MarkovSystem(tent_map(), (0, Q(1, 3), 1))       # not forward invariant
    with pytest.raises(MarkovError):
        MarkovSystem(tent_map(), (0, 1))                  # not monotone on [0, 1]
    with pytest.raises(MarkovError):
        MarkovSystem(tent_map(), (0, Q(1, 2)))            # 1 missing
    with pytest.raises(MarkovError):
        MarkovSystem(PeriodicLift(((0, 0), (Q(1, 2), Q(3, 2)))), (0, Q(1, 4)))


def test_irreducibility():
    assert FULL.is_irreducible() and GP.is_irreducible()
    assert not FiniteStructure(None, [[1, 1], [0, 1]]).is_irreducible()


def test_structure_json_round_trip():
    for ts in (FULL, GP, build_example()["gamma"]):
        assert structure_from_json(json.loads(json.dumps(ts.to_json()))) == ts
    assert parse_state(GP, "-2,0") == (-2, 0) and parse_state(GP, 3) == (0, 3)


# --- refinement --------------------------------------------------------------------

def test_refine_examples():
    cyl = refine(TENT_SYS, 1)
    assert len(cyl) == 4
    assert sorted({c.left for c in cyl} | {c.right for c in cyl}) == [0, Q(1, 4), Q(1, 2), Q(3, 4), 1]
    cyl = refine(FA_SYS, 1)
    assert len(cyl) == 4
    first = next(c for c in cyl if c.word == (0, 0))
    assert (first.left, first.right) == (0, Q(9, 25))
    assert len(refine(TENT_SYS, 2)) == 8


@pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
def test_refine_itinerary_and_onto(n):
    f = FA_SYS.map
    ivs = FA_SYS.intervals
    fn = iterate(f, n)
    for c in refine(FA_SYS, n):
        mid = (c.left + c.right) / 2
        x = mid
        for sym in c.word:
            a, b = ivs[sym]
            assert a <= x <= b
            x = f(x)
        a, b = ivs[c.word[-1]]
        assert sorted((fn(c.left), fn(c.right))) == [a, b]


def test_refine_lengths_shrink():
    widths = [max(c.right - c.left for c in refine(FA_SYS, n)) for n in range(7)]
    assert all(v <= u for u, v in zip(widths, widths[1:]))
    assert widths[-1] < Q(1, 20)


def test_refine_cap():
    with pytest.raises(ResourceLimitError):
        refine(TENT_SYS, 12, cap=100)


def test_partition_images_stay_in_partition():
    for ms in (FA_SYS, TENT_SYS):
        assert all(ms.map(p) in ms.partition for p in ms.partition)


# --- path counts: oracles ----------------------------------------------------------------

def test_gamma_prime_loops_match_hand_values():
    assert path_counts(GP, 0, 6).loops == [1, 2, 8, 32, 136, 592, 2624]


@pytest.mark.parametrize("n", range(1, 7))
def test_gamma_prime_counts_vs_enumeration(n):
    tab = path_counts(GP, 0, n)
    ends = enumerate_paths(GP.successors, (0, 0), n)
    assert tab.loops[n] == ends.get((0, 0), 0)
    assert tab.row[n] == sum(ends.values())
    assert tab.loops[n] == sum(1 for p in dfs_paths(GP.successors, (0, 0), n) if p[-1] == (0, 0))
    starts = [(c, 0) for c in range(-n, n + 1)]
    assert tab.col[n] == sum(enumerate_paths(GP.successors, s, n).get((0, 0), 0) for s in starts)


@pytest.mark.parametrize("n", range(1, 6))
def test_gamma_counts_vs_enumeration(n):
    gamma = build_example()["gamma"]
    for a in [(0, 0), (0, 1)]:
        for b in [(0, 0), (1, 1), (-1, 0)]:
            tab = path_counts(gamma, a, n, b=b)
            assert tab.loops[n] == enumerate_paths(gamma.successors, a, n).get(b, 0)
            starts = [(c, i) for c in range(-n - 2, n + 3) for i in range(2)]
            assert tab.col[n] == sum(enumerate_paths(gamma.successors, s, n).get(b, 0) for s in starts)


def test_gamma_prime_columns_are_powers_of_5():
    assert path_counts(GP, 0, 40).col == [5**n for n in range(41)]


def test_full_shift_counts():
    tab = path_counts(FULL, 0, 20)
    assert tab.loops[1:] == [2 ** (n - 1) for n in range(1, 21)]


def test_banded_window_invariance():
    from lipconj.markov_chain import _banded_vectors
    n = 10
    _, small = _banded_vectors(GP, (0, 0), n, True, n)
    _, big = _banded_vectors(GP, (0, 0), n, True, n + 7)
    for u, v in zip(small, big):
        assert int(u.sum()) == int(v.sum())
        assert int(u[n, 0]) == int(v[n + 7, 0])


def test_cardinality_bridge_preimages_equal_column_counts():
    gamma = build_example()["gamma"]
    tab = path_counts(gamma, (0, 0), 6)
    for n in range(1, 7):
        assert len(preimages(lift(), GENERIC_X, n)) == tab.col[n]


@st.composite
def small_matrices(draw):
    k = draw(st.integers(1, 4))
    return FiniteStructure(None, [[draw(st.integers(0, 2)) for _ in range(k)] for _ in range(k)])


@settings(max_examples=40, deadline=None)
@given(small_matrices(), st.integers(0, 6), st.integers(0, 6))
def test_chapman_kolmogorov(ts, n, m):
    A = ts.array()
    P = lambda k: np.linalg.matrix_power(A.astype(object), k) if k else np.eye(len(ts), dtype=int).astype(object)
    Pn, Pm, Pnm = P(n), P(m), P(n + m)
    k = len(ts)
    for a in range(k):
        for b in range(k):
            assert Pnm[a, b] == sum(Pn[a, j] * Pm[j, b] for j in range(k))
            assert path_counts(ts, a, n + m, b=b).loops[n + m] == Pnm[a, b]


# --- taboo and first entrance --------------------------------------------------------

def test_taboo_examples():
    fe = taboo_counts(GP, 0, 4)
    assert fe == [1, 3, 11, 47, 211]
    assert taboo_counts(FULL, 0, 10) == [1] + [1] * 10


@pytest.mark.parametrize("n", range(1, 6))
def test_taboo_vs_filtered_enumeration(n):
    # paths of length n ending at 0 that visit 0 only at the end
    starts = [(c, 0) for c in range(-n, n + 1) if c]
    want = 0
    for s in starts:
        want += sum(1 for p in dfs_paths(GP.successors, s, n) if p[-1] == (0, 0) and (0, 0) not in p[:-1])
    assert taboo_counts(GP, 0, n)[n] == want


def test_first_return_counts():
    tv = taboo_vectors(GP, 0, 6)
    for n in range(1, 7):
        want = sum(1 for p in dfs_paths(GP.successors, (0, 0), n) if p[-1] == (0, 0) and (0, 0) not in p[1:-1])
        assert tv.first_return[n] == want


def test_convolution_identity():
    assert convolution_identity_check(GP, 0, 30).ok
    assert convolution_identity_check(FULL, 0, 20).ok
    tab = path_counts(GP, 0, 10)
    tab.col[7] += 1
    rep = convolution_identity_check(GP, 0, 10, counts=tab)
    assert not rep.ok and rep.first_failure == 7
    fe = taboo_counts(GP, 0, 10)
    fe[3] -= 1
    assert convolution_identity_check(GP, 0, 10, first_entrance=fe).first_failure == 3


def test_n1_convolution_by_hand():
    tab = path_counts(GP, 0, 1)
    fe = taboo_counts(GP, 0, 1)
    assert tab.col[1] == fe[0] * tab.loops[1] + fe[1] * tab.loops[0] == 5


@settings(max_examples=25, deadline=None)
@given(small_matrices())
def test_convolution_identity_random(ts):
    assert convolution_identity_check(ts, 0, 10).ok


# --- entropy estimates --------------------------------------------------------------

def test_revsalama_is_log5_from_start():
    est = entropy_estimates(GP, 0, 30, estimator="ratio")
    assert all(v == pytest.approx(math.log(5), abs=1e-15) for v in est.revsalama)


def test_gurevich_ratio_at_400():
    est = entropy_estimates(GP, 0, 400, estimator="ratio")
    assert abs(math.exp(est.last["gurevich"]) / (2 + 2 * math.sqrt(2)) - 1) < 0.01


def test_full_shift_entropies():
    est = entropy_estimates(FULL, 0, 12, estimator="ratio")
    for seq in (est.gurevich[1:], est.salama, est.revsalama):
        assert all(v == pytest.approx(math.log(2), abs=1e-15) for v in seq)


def test_revsalama_dominates_gurevich_exactly():
    tab = path_counts(GP, 0, 60)
    assert all(c >= l for c, l in zip(tab.col, tab.loops))


def test_scaled_mode_agrees_with_exact():
    ex = path_counts(GP, 0, 60, mode="exact")
    sc = path_counts(GP, 0, 60, mode="scaled")
    for n in range(61):
        assert sc.loops[n] == pytest.approx(math.log(ex.loops[n]), rel=1e-12, abs=1e-12)
        assert sc.col[n] == pytest.approx(n * math.log(5), rel=1e-12, abs=1e-12)
    exf = path_counts(FULL, 0, 40, mode="exact")
    scf = path_counts(FULL, 0, 40, mode="scaled")
    assert scf.loops[40] == pytest.approx(math.log(exf.loops[40]), rel=1e-12)


def test_zero_counts_reported():
    ts = FiniteStructure(None, [[0, 1], [1, 0]])        # period 2: odd loops vanish
    est = entropy_estimates(ts, 0, 6, estimator="root")
    assert est.zero_counts["gurevich"] == [1, 3, 5]
    assert est.gurevich[1] == pytest.approx(0.0)


def test_lift_system_is_banded():
    ms = MarkovSystem(lift(), (0, Q(3, 5)))
    assert isinstance(build_transition(ms), BandedStructure)
    with pytest.raises(TypeError):
        refine(ms, 1)
