"""Hot inner loops.

Every kernel has a loop form (compiled with numba unless disabled) and a
vectorized numpy form.  The public names dispatch to one of them according
to :mod:`lipconj._accel`; both forms are importable so tests and the
benchmark can compare them directly.
"""
import math

import numpy as np

from ._accel import USE_NUMBA, njit

INT64_SAFE = 2**62


# ---------------------------------------------------------------------------
# one step of exact branchwise inversion on a common-denominator grid
# ---------------------------------------------------------------------------

def _preimage_step_loop(xs, d, ylo, yhi, xm, cm):
    npieces = ylo.shape[0]
    out = np.empty(xs.shape[0] * npieces, dtype=np.int64)
    cnt = 0
    flat_hit = False
    for k in range(xs.shape[0]):
        x = xs[k]
        for i in range(npieces):
            lo = min(ylo[i], yhi[i])
            hi = max(ylo[i], yhi[i])
            if lo <= x <= hi:
                if ylo[i] == yhi[i]:
                    flat_hit = True
                else:
                    out[cnt] = xm[i] * d + (x - ylo[i]) * cm[i]
                    cnt += 1
    return np.unique(out[:cnt]), flat_hit


def preimage_step_numpy(xs, d, ylo, yhi, xm, cm):
    lo = np.minimum(ylo, yhi)
    hi = np.maximum(ylo, yhi)
    hit = (xs[:, None] >= lo[None, :]) & (xs[:, None] <= hi[None, :])
    flat = ylo == yhi
    flat_hit = bool(np.any(hit[:, flat]))
    hit[:, flat] = False
    rows, cols = np.nonzero(hit)
    new = xm[cols] * d + (xs[rows] - ylo[cols]) * cm[cols]
    return np.unique(new), flat_hit


preimage_step_loop = njit(_preimage_step_loop)
preimage_step = preimage_step_loop if USE_NUMBA else preimage_step_numpy


# ---------------------------------------------------------------------------
# banded transfer-matrix propagation in renormalized floating point
# ---------------------------------------------------------------------------

def _banded_scaled_run_loop(x0, blocks, band, n_steps, anchor_cell, anchor_local, forward):
    ncells, s = x0.shape
    x = x0.copy()
    log_anchor = np.empty(n_steps + 1)
    log_total = np.empty(n_steps + 1)
    logscale = 0.0
    a0 = x[anchor_cell, anchor_local]
    log_anchor[0] = math.log(a0) if a0 > 0 else -np.inf
    tot = x.sum()
    log_total[0] = math.log(tot) if tot > 0 else -np.inf
    for step in range(1, n_steps + 1):
        y = np.zeros_like(x)
        for di in range(2 * band + 1):
            d = di - band
            for c in range(ncells):
                c2 = c + d
                if c2 < 0 or c2 >= ncells:
                    continue
                for i in range(s):
                    for j in range(s):
                        w = blocks[di, i, j]
                        if w == 0.0:
                            continue
                        if forward:
                            y[c2, j] += x[c, i] * w
                        else:
                            y[c, i] += w * x[c2, j]
        m = y.max()
        if m <= 0.0:
            for k in range(step, n_steps + 1):
                log_anchor[k] = -np.inf
                log_total[k] = -np.inf
            return log_anchor, log_total
        y /= m
        logscale += math.log(m)
        a = y[anchor_cell, anchor_local]
        log_anchor[step] = math.log(a) + logscale if a > 0 else -np.inf
        log_total[step] = math.log(y.sum()) + logscale
        x = y
    return log_anchor, log_total


def banded_scaled_run_numpy(x0, blocks, band, n_steps, anchor_cell, anchor_local, forward):
    ncells = x0.shape[0]
    x = x0.copy()
    log_anchor = np.full(n_steps + 1, -np.inf)
    log_total = np.full(n_steps + 1, -np.inf)
    logscale = 0.0
    with np.errstate(divide="ignore"):
        log_anchor[0] = np.log(x[anchor_cell, anchor_local])
        log_total[0] = np.log(x.sum())
    for step in range(1, n_steps + 1):
        y = np.zeros_like(x)
        for di in range(2 * band + 1):
            d = di - band
            lo, hi = max(0, -d), min(ncells, ncells - d)
            if lo >= hi:
                continue
            if forward:
                y[lo + d:hi + d] += x[lo:hi] @ blocks[di]
            else:
                y[lo:hi] += x[lo + d:hi + d] @ blocks[di].T
        m = y.max()
        if m <= 0.0:
            break
        y /= m
        logscale += math.log(m)
        with np.errstate(divide="ignore"):
            log_anchor[step] = np.log(y[anchor_cell, anchor_local]) + logscale
        log_total[step] = math.log(y.sum()) + logscale
        x = y
    return log_anchor, log_total


banded_scaled_run_loop = njit(_banded_scaled_run_loop)
banded_scaled_run = banded_scaled_run_loop if USE_NUMBA else banded_scaled_run_numpy


# ---------------------------------------------------------------------------
# piecewise-linear interpolation on a float grid
# ---------------------------------------------------------------------------

def _pwl_eval_loop(bx, by, xs):
    out = np.empty(xs.shape[0])
    n = bx.shape[0]
    for k in range(xs.shape[0]):
        x = xs[k]
        lo, hi = 0, n - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if bx[mid] <= x:
                lo = mid
            else:
                hi = mid
        t = (x - bx[lo]) / (bx[hi] - bx[lo])
        out[k] = by[lo] + t * (by[hi] - by[lo])
    return out


def pwl_eval_numpy(bx, by, xs):
    return np.interp(xs, bx, by)


pwl_eval_loop = njit(_pwl_eval_loop)
pwl_eval = pwl_eval_loop if USE_NUMBA else pwl_eval_numpy
