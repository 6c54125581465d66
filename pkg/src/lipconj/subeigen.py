"""Subeigenvectors: verification, Pruitt's construction, summability, banded thresholds."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DivergenceError
from .markov_chain import (BandedStructure, FiniteStructure, _banded_vectors, _finite_vectors,
                           _state_label, parse_state, path_counts, taboo_vectors)
from .pwl_map import as_rational


@dataclass
class SubeigenVector:
    lam: object
    entries: dict
    deficiency: frozenset = frozenset()
    truncation: dict = field(default_factory=dict)
    tails: dict = field(default_factory=dict, repr=False)

    def tail_on(self, states) -> float:
        """Largest relative truncation overshoot over ``states`` (0 if none recorded)."""
        return max((self.tails.get(s, 0.0) for s in states), default=0.0)

    def normalized(self) -> "SubeigenVector":
        total = sum(self.entries.values())
        return SubeigenVector(self.lam, {k: v / total for k, v in self.entries.items()},
                              self.deficiency, dict(self.truncation))

    def to_json(self) -> dict:
        return {"lambda": float(self.lam),
                "entries": {_entry_key(k): float(v) for k, v in self.entries.items()},
                "deficiency": sorted(_entry_key(k) for k in self.deficiency),
                "truncation": self.truncation}


def _entry_key(k) -> str:
    return f"({k[0]},{k[1]})" if isinstance(k, tuple) else str(k)


@dataclass
class SubeigenReport:
    ok: bool
    deficiencies: set
    max_ratio: float
    boundary_rows: list
    violations: list


def _as_entries(ts, v) -> dict:
    if isinstance(v, SubeigenVector):
        return dict(v.entries)
    if isinstance(v, dict):
        return {parse_state(ts, k) if isinstance(ts, BandedStructure) else k: val for k, val in v.items()}
    return dict(zip(ts.states, v))


def _successors(ts, state):
    if isinstance(ts, BandedStructure):
        return ts.successors(state)
    i = ts.index(state)
    return [(ts.states[j], a) for j, a in ts.successors(i)]


def verify_subeigenvector(ts, v, lam, window=None, rtol=0) -> SubeigenReport:
    """Check (Av)_i <= lam v_i row by row.

    Rows with a successor outside the support of ``v`` are truncated and
    excluded (listed in ``boundary_rows``).  ``window`` = (lo_cell, hi_cell)
    restricts the checked rows of a banded structure.  Comparisons are exact
    for rational input; ``rtol`` allows (Av)_i <= lam v_i (1 + rtol).
    """
    entries = _as_entries(ts, v)
    lam = as_rational(lam) if not isinstance(lam, Fraction) else lam
    slack = 1 + as_rational(rtol)
    if any(val <= 0 for val in entries.values()):
        raise ValueError("v must be positive on its support")
    defic, boundary, bad = set(), [], []
    max_ratio = 0.0
    for state, vi in entries.items():
        if window is not None and not window[0] <= state[0] <= window[1]:
            continue
        succ = _successors(ts, state)
        if any(t not in entries for t, _ in succ):
            boundary.append(state)
            continue
        av = sum(m * entries[t] for t, m in succ)
        max_ratio = max(max_ratio, float(Fraction(av) / Fraction(vi)) if av else 0.0)
        if av > lam * vi * slack:
            bad.append(state)
        elif av < lam * vi:
            defic.add(state)
    return SubeigenReport(not bad, defic, max_ratio, boundary, bad)


# ---------------------------------------------------------------------------
# series helpers
# ---------------------------------------------------------------------------

def _term(count: int, lam: Fraction, n: int) -> float:
    num = count * lam.denominator**n
    den = lam.numerator**n
    return num / den if count else 0.0


@dataclass
class SeriesVerdict:
    partial: float
    extrapolated: float
    ratio: float
    divergent: bool


def _series_verdict(terms: list, N: int, tol: float) -> SeriesVerdict:
    """Compare geometric extrapolations of a nonnegative series at depth N and 2N."""

    def at(k):
        s = math.fsum(terms[:k + 1])
        prev, last = terms[k - 1], terms[k]
        if last == 0.0:
            return s, s, 0.0
        r = last / prev if prev else math.inf
        ext = s + last * r / (1 - r) if r < 1 else math.inf
        return s, ext, r

    s1, e1, r1 = at(N)
    s2, e2, r2 = at(2 * N)
    divergent = r2 >= 1.0 or r1 >= 1.0 or not math.isfinite(e2) or abs(e2 - e1) > tol * abs(e2)
    return SeriesVerdict(s1, e1, r2, divergent)


# ---------------------------------------------------------------------------
# Pruitt's construction
# ---------------------------------------------------------------------------

def pruitt_construct(ts, a, lam, N: int, tol: float = 1e-6) -> SubeigenVector:
    """v_k = sum_{n=0}^{N} p_ka^(n) lam^-n, exact.

    Raises DivergenceError when the loop series at a is not Cauchy under
    doubling N (lam below the Gurevich threshold).  ``truncation["tail"]`` is
    max_k p_ka^(N+1) lam^-(N+1) / v_k, the relative amount by which the
    truncated vector can exceed the subeigen inequality.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    lam = as_rational(lam)
    a = parse_state(ts, a)
    loops = path_counts(ts, a, 2 * N).loops
    if math.log(float(lam)) <= _gurevich_ratio(loops):
        warnings.warn("lambda does not exceed the Gurevich estimate", RuntimeWarning, stacklevel=2)
    verdict = _series_verdict([_term(p, lam, n) for n, p in enumerate(loops)], N, tol)
    if verdict.divergent:
        raise DivergenceError(f"loop series at {a} is not Cauchy for lambda={lam} at depth {N}")
    p, q = lam.numerator, lam.denominator
    if isinstance(ts, BandedStructure):
        radius = (N + 1) * ts.band + abs(a[0])
        lo, vecs = _banded_vectors(ts, a, N + 1, False, radius)
        s = ts.states_per_cell
        states = [(lo + c, i) for c in range(vecs[0].shape[0]) for i in range(s)]
        vecs = [v.reshape(-1) for v in vecs]
    else:
        vecs = _finite_vectors(ts, ts.index(a), N + 1, False)
        states = list(ts.states)
    acc = np.zeros(len(states), dtype=object)
    acc[:] = 0
    for n in range(N + 1):
        acc = acc + vecs[n] * (q**n * p ** (N - n))
    scale = p**N
    entries = {st: Fraction(int(acc[k]), scale) for k, st in enumerate(states) if acc[k]}
    nxt = vecs[N + 1]
    tails = {st: float(Fraction(int(nxt[k]) * q ** (N + 1), p ** (N + 1)) / entries[st]) * (1 + 1e-9)
             for k, st in enumerate(states) if st in entries and nxt[k]}
    tail_f = max(tails.values(), default=0.0)
    rep = verify_subeigenvector(ts, entries, lam, rtol=tail_f)
    radius_cells = (N + 1) * ts.band if isinstance(ts, BandedStructure) else None
    return SubeigenVector(lam, entries, frozenset(rep.deficiencies),
                          {"depth": N, "window_radius": radius_cells, "tail": tail_f,
                           "loop_series": verdict.extrapolated}, tails)


def pruitt_identity_check(ts: FiniteStructure, a, lam, N: int) -> bool:
    """Exact check of lam^-1 (A v^(N))_i = v_i^(N+1) - [i = a] for the truncated series."""
    lam = as_rational(lam)
    a = parse_state(ts, a)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        vn = _raw_series(ts, a, lam, N)
        vn1 = _raw_series(ts, a, lam, N + 1)
    for i, st in enumerate(ts.states):
        av = sum(m * vn.get(ts.states[j], 0) for j, m in ts.successors(i))
        if av / lam != vn1.get(st, 0) - (1 if st == a else 0):
            return False
    return True


def _raw_series(ts, a, lam, N):
    vecs = _finite_vectors(ts, ts.index(a), N, False)
    out = {}
    for k, st in enumerate(ts.states):
        val = sum(Fraction(int(vecs[n][k])) * lam**-n for n in range(N + 1))
        if val:
            out[st] = val
    return out


def _gurevich_ratio(loops) -> float:
    for n in range(len(loops) - 1, 0, -1):
        if loops[n] and loops[n - 1]:
            return math.log(loops[n] / loops[n - 1])
    return -math.inf


def pruitt_exact(ts: FiniteStructure, a, lam) -> SubeigenVector:
    """Exact Pruitt vector of a finite structure: the solution of (lam I - A) v = lam e_a.

    Equals sum_n A^n e_a lam^-n when lam exceeds the spectral radius; then
    A v = lam v - lam e_a holds exactly.
    """
    lam = as_rational(lam)
    n = len(ts)
    ia = ts.index(parse_state(ts, a))
    rows = [[(lam if i == j else 0) - ts.matrix[i][j] for j in range(n)] + [lam if i == ia else 0]
            for i in range(n)]
    rows = [[Fraction(x) for x in r] for r in rows]
    for col in range(n):
        piv = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if piv is None:
            raise DivergenceError("singular system; lambda is an eigenvalue")
        rows[col], rows[piv] = rows[piv], rows[col]
        pr = rows[col]
        inv = 1 / pr[col]
        for r in range(n):
            if r != col and rows[r][col] != 0:
                f = rows[r][col] * inv
                rows[r] = [x - f * y for x, y in zip(rows[r], pr)]
    v = [rows[i][n] / rows[i][i] for i in range(n)]
    if any(x <= 0 for x in v):
        raise DivergenceError("resolvent not positive; lambda below the spectral radius")
    entries = dict(zip(ts.states, v))
    return SubeigenVector(lam, entries, frozenset({ts.states[ia]}), {"depth": None, "exact": True})


# ---------------------------------------------------------------------------
# summability and Pruitt's lower bound
# ---------------------------------------------------------------------------

@dataclass
class SummabilityResult:
    partial_sums: list
    value: float
    extrapolated: float
    ratio: float
    divergent: bool


def summability(ts, a, lam, N: int, tol: float = 1e-6) -> SummabilityResult:
    """Partial sums of sum_k v_k = sum_n p_.a^(n) lam^-n for the Pruitt vector at a."""
    if N < 1:
        raise ValueError("N must be at least 1")
    lam = as_rational(lam)
    col = path_counts(ts, a, 2 * N).col
    terms = [_term(p, lam, n) for n, p in enumerate(col)]
    partial, s = [], 0.0
    for t in terms[:N + 1]:
        s += t
        partial.append(s)
    partial[-1] = math.fsum(terms[:N + 1])
    verdict = _series_verdict(terms, N, tol)
    return SummabilityResult(partial, partial[-1], verdict.extrapolated, verdict.ratio, verdict.divergent)


@dataclass
class LowerBoundReport:
    ok: bool
    failures: list


def pruitt_lower_bound_check(ts, v, a, lam, n_max: int) -> LowerBoundReport:
    """v_k >= v_a * sum_{n=1}^{n_max} taboo p^a_ka^(n) lam^-n for every k in the support of v."""
    lam = as_rational(lam)
    a = parse_state(ts, a)
    entries = _as_entries(ts, v)
    tv = taboo_vectors(ts, a, n_max)
    va = entries[a]
    fails = []
    for k, st in enumerate(tv.states):
        if st not in entries:
            continue
        if st == a:
            series = sum(Fraction(tv.first_return[n]) * lam**-n for n in range(1, n_max + 1))
        else:
            series = sum(Fraction(int(tv.vectors[n][k])) * lam**-n for n in range(1, n_max + 1))
        if entries[st] < va * series:
            fails.append(st)
    return LowerBoundReport(not fails, fails)


# ---------------------------------------------------------------------------
# banded thresholds
# ---------------------------------------------------------------------------

@dataclass
class PerronResult:
    threshold: float
    m_star: float
    lam: float
    roots: list
    discriminant: float | None = None


def _symbol(offsets: dict, t: float) -> float:
    return sum(c * math.exp(d * t) for d, c in offsets.items())


def char_roots(offsets: dict, lam: float) -> list:
    """Positive real roots m of sum_d c_d m^(d+b) = lam m^b (b = band)."""
    b = max(abs(int(d)) for d in offsets)
    coeffs = np.zeros(2 * b + 1)
    for d, c in offsets.items():
        coeffs[int(d) + b] += float(c)
    coeffs[b] -= float(lam)
    roots = np.roots(coeffs[::-1])
    scale = max(1.0, float(np.max(np.abs(roots)))) if roots.size else 1.0
    pos = sorted(float(r.real) for r in roots if abs(r.imag) <= 1e-7 * scale and r.real > 0)
    out = []
    for r in pos:
        if not out or abs(r - out[-1]) > 1e-7 * max(1.0, r):
            out.append(r)
    return out


def banded_perron(offsets: dict, tol: float = 1e-13, lam: float | None = None) -> PerronResult:
    """Least lam for which the scalar banded recurrence has a positive geometric solution.

    lam(m) = sum_d c_d m^d is convex in log m; its minimum over m > 0 is the
    threshold, located by bisection on the sign of the derivative.
    """
    offs = {int(d): float(c) for d, c in offsets.items() if float(c) != 0.0}
    if any(c < 0 for c in offs.values()):
        raise ValueError("coefficients must be nonnegative")
    if not any(d > 0 for d in offs) or not any(d < 0 for d in offs):
        raise ValueError("no positive root in search range: need arrows in both directions")

    def slope(t):
        return sum(d * c * math.exp(d * t) for d, c in offs.items())

    lo, hi = -1.0, 1.0
    while slope(lo) > 0:
        lo *= 2
    while slope(hi) < 0:
        hi *= 2
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if slope(mid) < 0:
            lo = mid
        else:
            hi = mid
    t_star = 0.5 * (lo + hi)
    thr = _symbol(offs, t_star)
    at = thr if lam is None else float(lam)
    disc = None
    if max(abs(d) for d in offs) == 1:
        c1, c0, cm = offs.get(1, 0.0), offs.get(0, 0.0), offs.get(-1, 0.0)
        disc = (c0 - at) ** 2 - 4 * c1 * cm
    roots = [math.exp(t_star)] if lam is None else char_roots(offs, at)
    return PerronResult(thr, math.exp(t_star), at, roots, disc)


def block_perron(ts: BandedStructure, tol: float = 1e-12) -> float:
    """min over m > 0 of the spectral radius of sum_d B_d m^d (golden-section on log m)."""
    blocks = {d: np.array(b, dtype=float) for d, b in ts.blocks.items()}

    def rho(t):
        M = sum(B * math.exp(d * t) for d, B in blocks.items())
        return float(np.max(np.abs(np.linalg.eigvals(M))))

    lo, hi = -20.0, 20.0
    g = (math.sqrt(5) - 1) / 2
    x1, x2 = hi - g * (hi - lo), lo + g * (hi - lo)
    f1, f2 = rho(x1), rho(x2)
    while hi - lo > tol:
        if f1 < f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - g * (hi - lo)
            f1 = rho(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + g * (hi - lo)
            f2 = rho(x2)
    return rho(0.5 * (lo + hi))
