"""Time the compiled loop kernels against their numpy forms.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

The loop forms are numba-compiled unless LIPCONJ_DISABLE_NUMBA=1, in which
case they run as plain Python (slow; use a small --scale).
"""
import argparse
import json
import time

import numpy as np

from lipconj import kernels
from lipconj._accel import backend
from lipconj.gap_example import gamma_prime
from lipconj.pwl_map import preimage_count, tent_map


def best_of(fn, repeat):
    fn()  # warm-up (JIT compile)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def same(u, w):
    u, w = np.asarray(u), np.asarray(w)
    if u.dtype.kind in "iub":
        return bool(np.array_equal(u, w))
    return bool(np.allclose(u, w, rtol=1e-12, atol=0))


def preimage_case(scale):
    d = 1 << 20
    xs = np.unique(np.random.default_rng(0).integers(0, d, size=scale))
    ylo = np.array([0, d], dtype=np.int64)
    yhi = np.array([d, 0], dtype=np.int64)
    xm = np.array([0, 1], dtype=np.int64)
    cm = np.array([1, -1], dtype=np.int64)
    return (xs, 2, ylo, yhi, xm, cm)


def banded_case(steps):
    ts = gamma_prime()
    blocks = ts.block_array(float)
    ncells = 2 * steps + 1
    x0 = np.zeros((ncells, 1))
    x0[steps, 0] = 1.0
    return (x0, blocks, ts.band, steps, steps, 0, False)


def interp_case(scale):
    bx = np.linspace(0.0, 1.0, 4097)
    by = np.abs(np.sin(37 * bx))
    xs = np.random.default_rng(1).random(scale)
    return (bx, by, xs)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--scale", type=int, default=200_000)
    ap.add_argument("--steps", type=int, default=400)
    ap.add_argument("--json")
    args = ap.parse_args()

    cases = [
        ("preimage_step", kernels.preimage_step_loop, kernels.preimage_step_numpy, preimage_case(args.scale)),
        ("banded_scaled_run", kernels.banded_scaled_run_loop, kernels.banded_scaled_run_numpy, banded_case(args.steps)),
        ("pwl_eval", kernels.pwl_eval_loop, kernels.pwl_eval_numpy, interp_case(args.scale)),
    ]
    results = {"backend": backend(), "cases": {}}
    print(f"backend: {backend()}")
    print(f"{'kernel':<20}{'loop [s]':>12}{'numpy [s]':>12}{'numpy/loop':>12}  agree")
    for name, loop, vec, inp in cases:
        a, b = loop(*inp), vec(*inp)
        agree = all(same(u, w) for u, w in zip(a, b)) if isinstance(a, tuple) else same(a, b)
        t_loop = best_of(lambda: loop(*inp), args.repeat)
        t_vec = best_of(lambda: vec(*inp), args.repeat)
        results["cases"][name] = {"loop": t_loop, "numpy": t_vec, "agree": agree}
        print(f"{name:<20}{t_loop:>12.4f}{t_vec:>12.4f}{t_vec / t_loop:>12.2f}  {agree}")

    # end to end: exact tent preimage count through the dispatcher
    t0 = time.perf_counter()
    c = preimage_count(tent_map(), "1/3", 20)
    results["tent_preimages_n20"] = {"count": c, "seconds": time.perf_counter() - t0}
    print(f"tent #T^-20(1/3) = {c} in {results['tent_preimages_n20']['seconds']:.3f} s ({backend()})")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(results, fh, indent=2)


if __name__ == "__main__":
    main()
