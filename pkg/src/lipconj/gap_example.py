"""A degree-one lift whose Lipschitz infimum exceeds the exponential of its entropy.

The lift F has turning points z -> z - 1 and z + 3/5 -> z + 2, slopes +-5.
With I_n = (n, n + 3/5) and J_n = (n + 3/5, n + 1) its transition graph is
banded with two states per cell; coding a path by (state, cell jump) turns
it into the scalar band A'_{n,n-1} = 1, A'_{n,n} = A'_{n,n+1} = 2.  Column
sums of the band are 5 (so preimages grow like 5^n) while loops grow like
(2 + 2 sqrt 2)^n.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from .markov_chain import (BandedStructure, MarkovSystem, build_transition, entropy_estimates,
                           path_counts)
from .markov_conjugator import build_conjugate, lambda_ratios
from .pwl_map import PeriodicLift, PwlMap, as_rational, preimages
from .subeigen import banded_perron, pruitt_construct, pruitt_exact, summability

TURN = Fraction(3, 5)
GENERIC_X = Fraction(3, 10)
BAND = {-1: 1, 0: 2, 1: 2}
PERRON = 2 + 2 * math.sqrt(2)


def lift() -> PeriodicLift:
    return PeriodicLift(((0, -1), (TURN, 2)))


def gamma_prime() -> BandedStructure:
    return BandedStructure(1, 1, {d: [[c]] for d, c in BAND.items()})


def build_example() -> dict:
    F = lift()
    ms = MarkovSystem(F, (0, TURN))
    return {"lift": F, "system": ms, "gamma": build_transition(ms), "gamma_prime": gamma_prime()}


# ---------------------------------------------------------------------------
# finite windows
# ---------------------------------------------------------------------------

def window_map(R: int) -> MarkovSystem:
    """F clipped to [-R, R + 1] and rescaled affinely onto [0, 1].

    Partition points are the rescaled n and n + 3/5; the transition matrix is
    the restriction of the lift's graph to cells -R..R.
    """
    if R < 1:
        raise ValueError("R must be at least 1")
    F = lift()
    lo, hi = Fraction(-R), Fraction(R + 1)
    width = hi - lo
    xs = set()
    for n in range(-R, R + 1):
        xs.update((Fraction(n), n + TURN))
    xs.add(hi)
    for a, b in zip(sorted(xs), sorted(xs)[1:]):
        fa, fb = F(a), F(b)
        for level in (lo, hi):
            if min(fa, fb) < level < max(fa, fb):
                xs.add(a + (level - fa) * (b - a) / (fb - fa))
    pts = sorted(xs)
    ys = [min(max(F(x), lo), hi) for x in pts]
    f = PwlMap([(x - lo) / width for x in pts], [(y - lo) / width for y in ys], warn_contraction=False)
    part = sorted({(Fraction(n) - lo) / width for n in range(-R, R + 2)}
                  | {(n + TURN - lo) / width for n in range(-R, R + 1)})
    return MarkovSystem(f, part)


@dataclass
class WindowedConjugate:
    R: int
    lam: Fraction
    g: PwlMap
    lip: Fraction
    slopes: list
    anchor_slope: Fraction
    outside_mass: float


def outside_mass(lam=6, N: int = 200) -> dict:
    """R -> share of the lift's Pruitt vector (anchor I_0) carried by cells |c| > R."""
    lam = as_rational(lam)
    gamma = build_example()["gamma"]
    total = summability(gamma, (0, 0), lam, N).value
    by_cell = {}
    for (c, _i), x in pruitt_construct(gamma, (0, 0), lam, N).entries.items():
        by_cell[c] = by_cell.get(c, 0.0) + float(x)
    out, inside = {}, 0.0
    for R in range(N + 1):
        inside += by_cell.get(R, 0.0) + (by_cell.get(-R, 0.0) if R else 0.0)
        out[R] = max(0.0, 1 - inside / total)
    return out


def windowed_conjugate(R: int | None = None, lam=6, delta: float = 1e-6, N: int = 200) -> WindowedConjugate:
    """Conjugate of the window map built from the exact resolvent Pruitt vector.

    With ``R`` unset, the smallest window whose outside mass is <= delta is used.
    """
    lam = as_rational(lam)
    masses = outside_mass(lam, N)
    if R is None:
        R = next((r for r in sorted(masses) if r >= 1 and masses[r] <= delta), None)
        if R is None:
            raise ValueError("no window within the series depth reaches delta")
    ms = window_map(R)
    ts = build_transition(ms)
    a = 2 * R                                  # index of I_0 in the window
    v = pruitt_exact(ts, a, lam)
    vec = [v.entries[s] for s in ts.states]
    g = build_conjugate(ms, vec)
    slopes = lambda_ratios(ts, vec)
    return WindowedConjugate(R, lam, g, g.lipschitz_constant(), slopes, slopes[a],
                             masses.get(R, float("nan")))


# ---------------------------------------------------------------------------
# count identities
# ---------------------------------------------------------------------------

@dataclass
class BridgeReport:
    ok: bool
    rows: list      # (n, sum of Gamma row counts, 2 * Gamma' row count, column analogues)


def vertex_edge_count_bridge(gamma: BandedStructure, gprime: BandedStructure, n_max: int) -> BridgeReport:
    """Cell-0 row and column counts of Gamma equal twice those of Gamma' at 0."""
    s = gamma.states_per_cell
    tabs = [path_counts(gamma, (0, i), n_max) for i in range(s)]
    ref = path_counts(gprime, (0, 0), n_max)
    rows, ok = [], True
    for n in range(1, n_max + 1):
        r = sum(t.row[n] for t in tabs)
        c = sum(t.col[n] for t in tabs)
        good = r == s * ref.row[n] and c == s * ref.col[n]
        ok &= good
        rows.append((n, r, s * ref.row[n], c, s * ref.col[n]))
    return BridgeReport(ok, rows)


@dataclass
class GapReport:
    revsalama_estimate: float
    gurevich_estimate: float
    perron_threshold: float
    preimage_counts: list
    gap: float
    checks: dict = field(default_factory=dict)
    rows: list = field(default_factory=list, repr=False)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        d = asdict(self)
        d.pop("rows")
        d["preimage_counts"] = [str(c) for c in self.preimage_counts]
        d["ok"] = self.ok
        return d

    def csv_rows(self) -> list:
        return [("n", "p00", "p_col0", "ratio")] + self.rows


def run_gap_pipeline(n_counts: int = 40, n_entropy: int = 400, n_preimages: int = 6,
                     ratio_tol: float = 0.01) -> GapReport:
    """Every step is recorded as a named check; failures never raise."""
    ex = build_example()
    F, gamma, gp = ex["lift"], ex["gamma"], ex["gamma_prime"]
    checks = {}

    blocks = {d: [list(r) for r in gamma.block_array(int)[d + gamma.band]] for d in (-1, 0, 1)}
    checks["gamma_blocks"] = blocks == {-1: [[1, 1], [0, 0]], 0: [[1, 1], [1, 1]], 1: [[1, 1], [1, 1]]}
    checks["lift_slope_5"] = F.lipschitz_constant() == 5 and all(
        abs((v1 - v0) / (o1 - o0)) == 5 for o0, o1, v0, v1 in F.segments())

    counts = path_counts(gp, 0, n_counts)
    checks["column_counts_5^n"] = all(counts.col[n] == 5**n for n in range(n_counts + 1))

    pre = [len(preimages(F, GENERIC_X, n)) for n in range(1, n_preimages + 1)]
    checks["preimages_5^n"] = pre == [5**n for n in range(1, n_preimages + 1)]

    est = entropy_estimates(gp, 0, n_entropy, estimator="ratio").last
    gur, rev = est["gurevich"], est["revsalama"]
    checks["gurevich_ratio"] = gur is not None and abs(math.exp(gur) / PERRON - 1) <= ratio_tol
    checks["preimage_growth_matches_revsalama"] = rev is not None and all(
        abs(math.log(pre[k + 1] / pre[k]) - rev) <= 1e-12 for k in range(len(pre) - 1))
    checks["lipschitz_equals_exp_revsalama"] = rev is not None and abs(math.log(F.lipschitz_constant()) - rev) <= 1e-12

    perron = banded_perron(BAND)
    checks["perron_threshold"] = abs(perron.threshold - PERRON) <= 1e-9
    gap = (rev - gur) if gur is not None and rev is not None else float("nan")
    checks["gap_positive"] = gap > 0

    rows = []
    for n in range(1, n_counts + 1):
        rows.append((n, counts.loops[n], counts.col[n], counts.loops[n] / counts.loops[n - 1]))
    return GapReport(rev, gur, perron.threshold, pre, gap, checks, rows)
