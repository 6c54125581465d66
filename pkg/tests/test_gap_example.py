import math
from fractions import Fraction as Q

import pytest

from lipconj.gap_example import (GENERIC_X, build_example, lift, run_gap_pipeline,
                                 vertex_edge_count_bridge, window_map)
from lipconj.markov_chain import entropy_estimates, path_counts
from lipconj.pwl_map import preimage_count, preimages, tent_map


@pytest.fixture(scope="module")
def example():
    return build_example()


def test_build_example_shapes(example):
    gamma, gp = example["gamma"], example["gamma_prime"]
    assert gamma.states_per_cell == 2 and gamma.band == 1
    assert gamma.blocks == {-1: ((1, 1), (0, 0)), 0: ((1, 1), (1, 1)), 1: ((1, 1), (1, 1))}
    assert [gamma.out_degree(i) for i in range(2)] == [6, 4]
    assert gp.out_degree(0) == 5 and gp.in_degree(0) == 5


def test_lift_laps_have_slope_5(example):
    F = example["lift"]
    assert all(abs((v1 - v0) / (o1 - o0)) == 5 for o0, o1, v0, v1 in F.segments())


def test_bridge_small_n_by_hand(example):
    rep = vertex_edge_count_bridge(example["gamma"], example["gamma_prime"], 2)
    assert rep.rows[0] == (1, 10, 10, 10, 10)
    assert rep.rows[1] == (2, 50, 50, 50, 50)


def test_bridge_up_to_20(example):
    assert vertex_edge_count_bridge(example["gamma"], example["gamma_prime"], 20).ok


def test_generic_x_is_inside_an_I_interval():
    assert 0 < GENERIC_X < Q(3, 5)


def test_preimage_growth_vs_column_counts(example):
    tab = path_counts(example["gamma"], (0, 0), 6)
    counts = [len(preimages(lift(), GENERIC_X, n)) for n in range(1, 7)]
    assert counts == [5**n for n in range(1, 7)] == tab.col[1:]


def test_pipeline_passes():
    rep = run_gap_pipeline(n_counts=40, n_entropy=400)
    assert rep.ok, rep.checks
    assert rep.revsalama_estimate == pytest.approx(math.log(5), abs=1e-12)
    assert abs(rep.gurevich_estimate - math.log(2 + 2 * math.sqrt(2))) < 0.01
    assert rep.gap >= 0.03
    assert math.log(5) - math.log(2 + 2 * math.sqrt(2)) == pytest.approx(0.0349, abs=1e-4)


def test_pipeline_reports_failure_without_raising():
    rep = run_gap_pipeline(n_counts=5, n_entropy=3, ratio_tol=1e-6)
    assert not rep.ok and not rep.checks["gurevich_ratio"]
    assert rep.checks["column_counts_5^n"]


def test_pipeline_csv_rows():
    rep = run_gap_pipeline(n_counts=6, n_entropy=50)
    rows = rep.csv_rows()
    assert rows[0] == ("n", "p00", "p_col0", "ratio")
    assert rows[1] == (1, 2, 5, 2.0) and rows[4][:3] == (4, 136, 625)


def test_tent_preimage_contrast():
    gp_est = entropy_estimates(build_example()["gamma_prime"], 0, 400).last
    for x in (Q(1, 3), Q(1, 2), Q(2, 3)):
        growth = math.log(preimage_count(tent_map(), x, 20)) / 20
        assert abs(growth / math.log(2) - 1) <= 0.05
    assert gp_est["revsalama"] - gp_est["gurevich"] == pytest.approx(0.035, abs=0.003)


def test_window_map_validation():
    with pytest.raises(ValueError):
        window_map(0)
    ms = window_map(2)
    assert len(ms.intervals) == 10
