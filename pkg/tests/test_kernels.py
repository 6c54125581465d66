import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lipconj import kernels
from lipconj.gap_example import build_example, gamma_prime

LOOPS = {
    "preimage": (kernels.preimage_step_loop, kernels._preimage_step_loop),
    "banded": (kernels.banded_scaled_run_loop, kernels._banded_scaled_run_loop),
    "pwl": (kernels.pwl_eval_loop, kernels._pwl_eval_loop),
}


@st.composite
def preimage_inputs(draw):
    d = draw(st.integers(2, 6))
    k = draw(st.integers(1, 4))
    ylo = np.array([draw(st.integers(0, 30)) for _ in range(k)], dtype=np.int64)
    yhi = np.array([draw(st.integers(0, 30)) for _ in range(k)], dtype=np.int64)
    xm = np.array([draw(st.integers(0, 5)) for _ in range(k)], dtype=np.int64)
    cm = np.array([draw(st.integers(-3, 3)) for _ in range(k)], dtype=np.int64)
    xs = np.unique(np.array(draw(st.lists(st.integers(0, 30), min_size=1, max_size=12)), dtype=np.int64))
    return xs, d, ylo, yhi, xm, cm


@settings(max_examples=60, deadline=None)
@given(preimage_inputs())
@pytest.mark.parametrize("which", [0, 1])
def test_preimage_step_forms_agree(which, inp):
    a, fa = LOOPS["preimage"][which](*inp)
    b, fb = kernels.preimage_step_numpy(*inp)
    assert np.array_equal(a, b) and bool(fa) == bool(fb)


@pytest.mark.parametrize("which", [0, 1])
@pytest.mark.parametrize("forward", [True, False])
def test_banded_run_forms_agree(which, forward):
    for ts in (gamma_prime(), build_example()["gamma"]):
        s = ts.states_per_cell
        steps = 40
        x0 = np.zeros((2 * steps + 1, s))
        x0[steps, 0] = 1.0
        args = (x0, ts.block_array(float), ts.band, steps, steps, 0, forward)
        la, ta = LOOPS["banded"][which](*args)
        lb, tb = kernels.banded_scaled_run_numpy(*args)
        assert np.allclose(la, lb, rtol=1e-12) and np.allclose(ta, tb, rtol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=30), st.integers(2, 12))
@pytest.mark.parametrize("which", [0, 1])
def test_pwl_eval_forms_agree(which, xs, k):
    bx = np.linspace(0, 1, k)
    by = np.cos(7 * bx) ** 2
    x = np.array(xs)
    assert np.allclose(LOOPS["pwl"][which](bx, by, x), kernels.pwl_eval_numpy(bx, by, x), rtol=1e-12, atol=1e-14)


def test_env_flag_selects_numpy_backend():
    env = dict(os.environ, LIPCONJ_DISABLE_NUMBA="1")
    code = ("from lipconj import kernels; from lipconj._accel import backend; "
            "print(backend(), kernels.preimage_step is kernels.preimage_step_numpy)")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["numpy", "True"]


def test_fallback_gives_identical_exact_results():
    env = dict(os.environ, LIPCONJ_DISABLE_NUMBA="1")
    code = ("from lipconj.pwl_map import preimage_count, tent_map, two_lap_map; "
            "from lipconj.gap_example import gamma_prime; from lipconj.markov_chain import path_counts; "
            "print(preimage_count(tent_map(), '1/3', 14), preimage_count(two_lap_map(), '2/7', 9), "
            "round(path_counts(gamma_prime(), 0, 120, mode='scaled').loops[120], 9))")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    from lipconj.markov_chain import path_counts
    from lipconj.pwl_map import preimage_count, tent_map, two_lap_map
    here = f"{preimage_count(tent_map(), '1/3', 14)} {preimage_count(two_lap_map(), '2/7', 9)} " \
           f"{round(path_counts(gamma_prime(), 0, 120, mode='scaled').loops[120], 9)}"
    assert out.stdout.strip() == here
