"""Constant-slope-type conjugates from a subeigenvector of a Markov system.

With lam_J = (Av)_J / v_J, the cylinder [I_0 ... I_n] receives the mass

    dpsi([I_0 ... I_n]) = v_{I_n} / (lam_{I_0} ... lam_{I_{n-1}}),

psi is the cumulative mass of the cylinders to the left of a point, and the
conjugate g is affine with slope +-lam_I on psi(I).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .markov_chain import MarkovSystem, build_transition, refine
from .pwl_map import MonotoneTable, PwlMap, as_rational
from .subeigen import verify_subeigenvector


def _vector(ms_or_ts, v) -> list:
    """Positive rational vector indexed by partition interval, scaled to sum 1."""
    if isinstance(v, dict):
        n = len(ms_or_ts.intervals) if isinstance(ms_or_ts, MarkovSystem) else len(ms_or_ts)
        states = list(range(n)) if isinstance(ms_or_ts, MarkovSystem) else list(ms_or_ts.states)
        v = [v[s] for s in states]
    vals = [as_rational(x) for x in v]
    if any(x <= 0 for x in vals):
        raise ValueError("v must have strictly positive entries")
    total = sum(vals)
    return [x / total for x in vals]


def lambda_ratios(ts, v) -> list:
    """lam_J = (Av)_J / v_J, exact; ``ts`` is a FiniteStructure or a MarkovSystem."""
    if isinstance(ts, MarkovSystem):
        ts = build_transition(ts)
    if isinstance(v, dict):
        v = [v[s] for s in ts.states]
    vals = [as_rational(x) for x in v]
    if len(vals) != len(ts):
        raise ValueError("v has the wrong length")
    if any(x <= 0 for x in vals):
        raise ValueError("v must have strictly positive entries")
    return [sum(m * vals[j] for j, m in ts.successors(i)) / vals[i] for i in range(len(ts))]


def delta_psi(word, v, lam) -> Fraction:
    out = v[word[-1]]
    for s in word[:-1]:
        out /= lam[s]
    return out


def psi_on_refinement(ms: MarkovSystem, v, n: int) -> MonotoneTable:
    """psi on the endpoints of all depth-n cylinders (words of n + 1 symbols)."""
    vv = _vector(ms, v)
    lam = lambda_ratios(build_transition(ms), vv)
    pairs = {Fraction(0): Fraction(0)}
    acc = Fraction(0)
    for cyl in refine(ms, n):
        pairs.setdefault(cyl.left, acc)
        acc += delta_psi(cyl.word, vv, lam)
        pairs[cyl.right] = acc
    xs, ys = [], []
    for x in sorted(pairs):
        if ys and pairs[x] == ys[-1]:
            continue                         # no mass between: keep the leftmost point
        xs.append(x)
        ys.append(pairs[x])
    if acc != 1 or xs[-1] != 1:
        raise ValueError("cylinders do not carry the full mass; is every interval expanding?")
    return MonotoneTable(xs, ys)


def psi_partition(ms: MarkovSystem, v) -> list:
    """psi at the partition points: cumulative sums of the scaled vector."""
    vv = _vector(ms, v)
    out, acc = [Fraction(0)], Fraction(0)
    for x in vv:
        acc += x
        out.append(acc)
    return out


def build_conjugate(ms: MarkovSystem, v) -> PwlMap:
    """PWL map through (psi(p), psi(f(p))) for p in the partition.

    Only the depth-0 values of psi are needed: on psi(I) the map is affine
    with slope +-lam_I, so deeper refinements add no breakpoints.
    """
    psi = psi_partition(ms, v)
    pos = {p: k for k, p in enumerate(ms.partition)}
    f = ms.map
    return PwlMap(psi, [psi[pos[f(p)]] for p in ms.partition], warn_contraction=False)


@dataclass
class IdentityReport:
    ok: bool
    checked: int
    additivity_failures: list
    shift_failures: list


def admissible_words(ts, depth: int):
    """All words of length depth + 1 along arrows of ``ts`` (index form)."""
    words = [(i,) for i in range(len(ts))]
    for _ in range(depth):
        words = [w + (j,) for w in words for j, _m in ts.successors(w[-1])]
    return words


def identity_checks(ms: MarkovSystem, v, n_max: int, table: dict | None = None) -> IdentityReport:
    """Exact additivity and shift relations of dpsi for all words of depth <= n_max.

    ``table`` overrides dpsi on chosen words (used to feed a corrupted table).
    """
    ts = build_transition(ms)
    vv = _vector(ms, v)
    lam = lambda_ratios(ts, vv)
    table = table or {}

    def d(w):
        return table[w] if w in table else delta_psi(w, vv, lam)

    add_bad, shift_bad, checked = [], [], 0
    for depth in range(n_max + 1):
        for w in admissible_words(ts, depth):
            checked += 1
            if depth < n_max:
                if sum(d(w + (j,)) for j, _m in ts.successors(w[-1])) != d(w):
                    add_bad.append(w)
            if depth >= 1 and d(w[1:]) != lam[w[0]] * d(w):
                shift_bad.append(w)
    return IdentityReport(not add_bad and not shift_bad, checked, add_bad, shift_bad)


def lipschitz_checks(ms: MarkovSystem, v, n: int, lam=None) -> dict:
    """Exact checks on psi table points.

    ``bound``: |psi(f x) - psi(f y)| <= lam |psi x - psi y| for all pairs;
    ``expansion``: equality with lam_I for pairs inside one partition interval.
    """
    psi = psi_on_refinement(ms, v, n)
    ts = build_transition(ms)
    lams = lambda_ratios(ts, _vector(ms, v))
    lam = max(lams) if lam is None else as_rational(lam)
    f = ms.map
    pts = list(psi.xs)
    img = [psi(f(x)) for x in pts]
    ivs = ms.intervals
    bound = expansion = True
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            dy = abs(img[j] - img[i])
            dx = psi.ys[j] - psi.ys[i]
            if dy > lam * dx:
                bound = False
            k = next((k for k, (a, b) in enumerate(ivs) if a <= pts[i] and pts[j] <= b), None)
            if k is not None and dy != lams[k] * dx:
                expansion = False
    return {"bound": bound, "expansion": expansion, "points": len(pts)}


@dataclass
class DecayReport:
    max_delta: list
    strictly_decreasing: bool


def cylinder_diameter_decay(ms: MarkovSystem, v, n_max: int) -> DecayReport:
    """max dpsi over depth-n cylinders for n = 0..n_max, exact, by dynamic programming."""
    ts = build_transition(ms)
    vv = _vector(ms, v)
    lam = lambda_ratios(ts, vv)
    best = [Fraction(1)] * len(ts)          # max of 1/prod(lam) over words ending at J
    out = [max(vv)]
    for _ in range(n_max):
        nxt = [Fraction(0)] * len(ts)
        for i in range(len(ts)):
            for j, _m in ts.successors(i):
                cand = best[i] / lam[i]
                if cand > nxt[j]:
                    nxt[j] = cand
        best = nxt
        out.append(max(vv[j] * best[j] for j in range(len(ts))))
    dec = all(b < a for a, b in zip(out, out[1:]))
    return DecayReport(out, dec)


@dataclass
class RoundTrip:
    v_prime: list
    equal: bool
    subeigen_ok: bool


def round_trip(ms: MarkovSystem, v, g: PwlMap | None = None, lam=None, depth: int = 3) -> RoundTrip:
    """v'_I = |psi(I)| recovered from the conjugacy; must equal v and be a lam-subeigenvector.

    psi(I) is read from the depth-``depth`` cylinder table; subeigenness is
    checked with the transition matrix of g on the partition psi(P), which
    must coincide with A(f, P).
    """
    vv = _vector(ms, v)
    g = g or build_conjugate(ms, vv)
    table = psi_on_refinement(ms, vv, depth)
    psi = [table(p) for p in ms.partition]
    v_prime = [b - a for a, b in zip(psi, psi[1:])]
    ms_g = MarkovSystem(g, psi)
    ts_g = build_transition(ms_g)
    lam = max(lambda_ratios(ts_g, v_prime)) if lam is None else lam
    ok = verify_subeigenvector(ts_g, v_prime, lam).ok
    return RoundTrip(v_prime, v_prime == vv, ok and ts_g.matrix == build_transition(ms).matrix)
