"""Transition structures, Markov refinements and exact path counting.

Two kinds of transition data are supported:

* :class:`FiniteStructure` -- a nonnegative integer matrix on finitely many states;
* :class:`BandedStructure` -- a Z-periodic, row-finite structure with ``s``
  states per cell and blocks ``B_d`` (``|d| <= band``) giving the number of
  arrows from local state i of cell c to local state j of cell c + d.

Path counts are exact Python integers.  On banded structures counts of length
``n`` are computed on a window of cell radius ``n * band`` around the anchor,
which no path of length ``n`` can leave.
"""
from __future__ import annotations

import bisect
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from .errors import MarkovError, ResourceLimitError
from .pwl_map import PeriodicLift, PwlMap, as_rational, fmt_rational

CYLINDER_CAP = 10**6
EXACT_LIMIT = 60


# ---------------------------------------------------------------------------
# transition structures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FiniteStructure:
    states: tuple
    matrix: tuple

    kind = "finite"

    def __post_init__(self):
        mat = tuple(tuple(int(a) for a in row) for row in self.matrix)
        states = tuple(self.states) if self.states is not None else tuple(range(len(mat)))
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "states", states)
        if any(len(row) != len(mat) for row in mat) or len(states) != len(mat):
            raise ValueError("matrix must be square and match the state list")
        if any(a < 0 for row in mat for a in row):
            raise ValueError("entries must be nonnegative")
        object.__setattr__(self, "_pos", {s: i for i, s in enumerate(states)})

    def __len__(self):
        return len(self.states)

    def index(self, state) -> int:
        if state in self._pos:
            return self._pos[state]
        if isinstance(state, (int, np.integer)) and 0 <= state < len(self.states):
            return int(state)
        raise KeyError(f"unknown state {state!r}")

    def array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=object)

    def successors(self, i: int):
        return [(j, a) for j, a in enumerate(self.matrix[i]) if a]

    def is_irreducible(self) -> bool:
        n = len(self.states)
        fwd = [[j for j, a in enumerate(row) if a] for row in self.matrix]
        bwd = [[i for i in range(n) if self.matrix[i][j]] for j in range(n)]
        return _reach_all(fwd, 0) and _reach_all(bwd, 0)

    def to_json(self) -> dict:
        return {"kind": "finite", "states": [_state_label(s) for s in self.states],
                "matrix": [list(row) for row in self.matrix]}


@dataclass(frozen=True)
class BandedStructure:
    states_per_cell: int
    band: int
    blocks: dict

    kind = "banded"

    def __post_init__(self):
        s, b = int(self.states_per_cell), int(self.band)
        if s < 1 or b < 1:
            raise ValueError("states_per_cell and band must be at least 1")
        blocks = {}
        for d, blk in self.blocks.items():
            d = int(d)
            if abs(d) > b:
                raise ValueError(f"block offset {d} exceeds band {b}")
            blk = tuple(tuple(int(a) for a in row) for row in blk)
            if len(blk) != s or any(len(row) != s for row in blk):
                raise ValueError(f"block {d} must be {s}x{s}")
            if any(a < 0 for row in blk for a in row):
                raise ValueError("entries must be nonnegative")
            blocks[d] = blk
        for d in range(-b, b + 1):
            blocks.setdefault(d, tuple((0,) * s for _ in range(s)))
        object.__setattr__(self, "states_per_cell", s)
        object.__setattr__(self, "band", b)
        object.__setattr__(self, "blocks", dict(sorted(blocks.items())))

    def __hash__(self):
        return hash((self.states_per_cell, self.band, tuple(self.blocks.items())))

    def block_array(self, dtype=object) -> np.ndarray:
        return np.array([self.blocks[d] for d in range(-self.band, self.band + 1)], dtype=dtype)

    def out_degree(self, i: int) -> int:
        return sum(sum(blk[i]) for blk in self.blocks.values())

    def in_degree(self, j: int) -> int:
        return sum(blk[i][j] for blk in self.blocks.values() for i in range(self.states_per_cell))

    def successors(self, state):
        c, i = state
        return [((c + d, j), blk[i][j]) for d, blk in self.blocks.items()
                for j in range(self.states_per_cell) if blk[i][j]]

    def truncate(self, lo_cell: int, hi_cell: int) -> FiniteStructure:
        """Finite principal submatrix on cells lo_cell..hi_cell (arrows leaving the window dropped)."""
        s = self.states_per_cell
        states = [(c, i) for c in range(lo_cell, hi_cell + 1) for i in range(s)]
        pos = {st: k for k, st in enumerate(states)}
        mat = [[0] * len(states) for _ in states]
        for (c, i), k in pos.items():
            for tgt, a in self.successors((c, i)):
                if tgt in pos:
                    mat[k][pos[tgt]] = a
        return FiniteStructure(tuple(states), tuple(tuple(r) for r in mat))

    def is_irreducible(self) -> bool:
        """Heuristic: strong connectivity of the truncation to cells -1, 0, 1.

        Sufficient for the structures used here; not a general decision procedure.
        """
        return self.truncate(-1, 1).is_irreducible()

    def to_json(self) -> dict:
        return {"kind": "banded", "states_per_cell": self.states_per_cell, "band": self.band,
                "blocks": {str(d): [list(r) for r in blk] for d, blk in self.blocks.items()}}


def _reach_all(adj, start) -> bool:
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return len(seen) == len(adj)


def _state_label(s):
    return f"{s[0]},{s[1]}" if isinstance(s, tuple) else s


def structure_from_json(obj: dict):
    kind = obj.get("kind")
    if kind == "finite":
        return FiniteStructure(tuple(obj.get("states") or range(len(obj["matrix"]))), obj["matrix"])
    if kind == "banded":
        return BandedStructure(obj["states_per_cell"], obj["band"],
                               {int(d): blk for d, blk in obj["blocks"].items()})
    raise ValueError(f"unknown structure kind {kind!r}")


def parse_state(ts, token):
    """Interpret a state given on the command line or in JSON.

    For banded structures an integer i means (cell 0, local i) and "c,i" means
    (cell c, local i).
    """
    if isinstance(ts, BandedStructure):
        if isinstance(token, tuple):
            return (int(token[0]), int(token[1]))
        text = str(token).strip().strip("()")
        if "," in text:
            c, i = text.split(",")
            return (int(c), int(i))
        return (0, int(text))
    if isinstance(token, str):
        if token in ts._pos:
            return token
        try:
            return ts.states[int(token)]
        except (ValueError, IndexError):
            raise KeyError(f"unknown state {token!r}") from None
    return ts.states[ts.index(token)]


# ---------------------------------------------------------------------------
# Markov systems
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CylinderWord:
    word: tuple
    left: Fraction
    right: Fraction


@dataclass(frozen=True)
class MarkovSystem:
    """Map together with a partition set.

    For a :class:`PwlMap` the partition holds points of [0, 1] (including 0
    and 1).  For a :class:`PeriodicLift` it holds the offsets in [0, 1) of the
    partition points in one cell; the partition set is their Z-translates.
    """

    map: object
    partition: tuple
    _images: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pts = tuple(sorted(set(as_rational(p) for p in self.partition)))
        object.__setattr__(self, "partition", pts)
        f = self.map
        if isinstance(f, PwlMap):
            if pts[0] != 0 or pts[-1] != 1:
                raise MarkovError("partition must contain 0 and 1")
            images = tuple(f(p) for p in pts)
            bad = [p for p, y in zip(pts, images) if y not in set(pts)]
            if bad:
                raise MarkovError(f"partition not forward invariant at {bad[:3]}")
            for a, b in zip(pts, pts[1:]):
                if not _monotone_on(f, a, b):
                    raise MarkovError(f"map not monotone on ({a}, {b})")
        elif isinstance(f, PeriodicLift):
            if any(p < 0 or p >= 1 for p in pts):
                raise MarkovError("lift partition offsets must lie in [0, 1)")
            images = tuple(f(p) for p in pts)
            for y in images:
                if y - math.floor(y) not in set(pts):
                    raise MarkovError(f"partition not forward invariant: image {y}")
            ext = list(pts) + [pts[0] + 1]
            for a, b in zip(ext, ext[1:]):
                if not _lift_monotone_on(f, a, b):
                    raise MarkovError(f"lift not monotone on ({a}, {b})")
        else:
            raise TypeError("MarkovSystem needs a PwlMap or PeriodicLift")
        object.__setattr__(self, "_images", images)

    @property
    def intervals(self) -> list:
        pts = self.partition
        if isinstance(self.map, PeriodicLift):
            ext = list(pts) + [pts[0] + 1]
            return list(zip(ext, ext[1:]))
        return list(zip(pts, pts[1:]))

    def orientation(self, k: int) -> int:
        a, b = self.intervals[k]
        fa, fb = self.map(a), self.map(b)
        return (fb > fa) - (fb < fa)


def _monotone_on(f: PwlMap, a, b) -> bool:
    xs = f.breakpoints
    i, j = bisect.bisect_right(xs, a), bisect.bisect_left(xs, b)
    vals = [f(a)] + list(f.values[i:j]) + [f(b)]
    diffs = [q - p for p, q in zip(vals, vals[1:])]
    return all(d >= 0 for d in diffs) or all(d <= 0 for d in diffs)


def _lift_monotone_on(F: PeriodicLift, a, b) -> bool:
    inner = []
    for z in (math.floor(a) - 1, math.floor(a), math.floor(a) + 1):
        inner += [z + o for o, _ in F.turning if a < z + o < b]
    vals = [F(x) for x in [a] + sorted(inner) + [b]]
    diffs = [q - p for p, q in zip(vals, vals[1:])]
    return all(d >= 0 for d in diffs) or all(d <= 0 for d in diffs)


def _cover_relation(lo, hi, a, b) -> int:
    if lo <= a and b <= hi:
        return 1
    if b <= lo or a >= hi:
        return 0
    raise MarkovError(f"image ({lo}, {hi}) neither covers nor misses ({a}, {b})")


def build_transition(ms: MarkovSystem):
    """A[I][J] = 1 iff f(I) covers J; raises MarkovError on partial overlap."""
    f = ms.map
    ivs = ms.intervals
    if isinstance(f, PwlMap):
        rows = []
        for a, b in ivs:
            lo, hi = sorted((f(a), f(b)))
            rows.append(tuple(_cover_relation(lo, hi, c, d) for c, d in ivs))
        return FiniteStructure(tuple(range(len(ivs))), tuple(rows))
    s = len(ivs)
    blocks: dict = {}
    for i, (a, b) in enumerate(ivs):
        lo, hi = sorted((f(a), f(b)))
        for cell in range(math.floor(lo) - 2, math.ceil(hi) + 2):
            for j, (c, d) in enumerate(ivs):
                if _cover_relation(lo, hi, cell + c, cell + d):
                    blk = blocks.setdefault(cell, [[0] * s for _ in range(s)])
                    blk[i][j] = 1
    band = max(1, max(abs(d) for d in blocks))
    return BandedStructure(s, band, blocks)


def _extreme_preimage(f: PwlMap, a, b, y, want_max_le: bool, increasing: bool):
    """On [a, b] where f is monotone, return the boundary of {f <= y} or {f >= y}.

    With ``increasing`` and ``want_max_le``: max{x : f(x) <= y}; otherwise the
    analogous extreme point bounding the preimage of an open interval.
    """
    xs = [a] + [x for x in f.breakpoints if a < x < b] + [b]
    vals = [f(x) for x in xs]
    if not increasing:
        xs, vals = xs[::-1], vals[::-1]
    # along xs, vals are nondecreasing
    if want_max_le:
        k = max(i for i, v in enumerate(vals) if v <= y)
        if k == len(xs) - 1 or vals[k] == y:
            return xs[k]
    else:
        k = min(i for i, v in enumerate(vals) if v >= y)
        if k == 0 or vals[k] == y:
            return xs[k]
        k -= 1
    x0, x1, v0, v1 = xs[k], xs[k + 1], vals[k], vals[k + 1]
    return x0 + (y - v0) * (x1 - x0) / (v1 - v0)


def _preimage_interval(f: PwlMap, a, b, c, d, orient: int):
    """Open interval {x in (a, b): c < f(x) < d} for f monotone on [a, b]."""
    if orient > 0:
        return (_extreme_preimage(f, a, b, c, True, True), _extreme_preimage(f, a, b, d, False, True))
    right = _extreme_preimage(f, a, b, c, True, False)
    left = _extreme_preimage(f, a, b, d, False, False)
    return (left, right)


def refine(ms: MarkovSystem, n: int, cap: int = CYLINDER_CAP) -> list:
    """All nonempty cylinders [I_0 ... I_n] with exact endpoints, left to right."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    f = ms.map
    if not isinstance(f, PwlMap):
        raise TypeError("refine works on PwlMap systems; window a lift first")
    ivs = ms.intervals
    A = build_transition(ms).matrix
    orient = [ms.orientation(k) for k in range(len(ivs))]
    level = [CylinderWord((k,), a, b) for k, (a, b) in enumerate(ivs)]
    for _ in range(n):
        nxt = []
        for k0, (a, b) in enumerate(ivs):
            if orient[k0] == 0:
                continue
            for cyl in level:
                if not A[k0][cyl.word[0]]:
                    continue
                left, right = _preimage_interval(f, a, b, cyl.left, cyl.right, orient[k0])
                if left < right:
                    nxt.append(CylinderWord((k0,) + cyl.word, left, right))
            if len(nxt) > cap:
                raise ResourceLimitError(f"more than {cap} cylinders")
        nxt.sort(key=lambda c: c.left)
        level = nxt
    return level


# ---------------------------------------------------------------------------
# path counting
# ---------------------------------------------------------------------------

@dataclass
class PathCountTable:
    """Exact path counts indexed by length n = 0..n_max.

    ``loops[n]`` = p_ab, ``row[n]`` = p_a., ``col[n]`` = p_.b; in scaled mode
    the lists hold natural logarithms instead and ``exact`` is False.
    """

    anchor: object
    target: object
    loops: list
    row: list
    col: list
    exact: bool = True
    first_entrance: list | None = None

    def to_rows(self):
        return [(n, self.loops[n], self.row[n], self.col[n]) for n in range(len(self.loops))]


def _window(ts: BandedStructure, state, radius_cells: int):
    c0 = state[0]
    lo = c0 - radius_cells
    return lo, 2 * radius_cells + 1


def _banded_vectors(ts: BandedStructure, start, n_steps: int, forward: bool, radius: int):
    """Exact propagation e_start A^n (forward) or A^n e_start (backward) on a window."""
    s, b = ts.states_per_cell, ts.band
    lo, ncells = _window(ts, start, radius)
    blocks = ts.block_array()
    x = np.zeros((ncells, s), dtype=object)
    x[:] = 0
    x[start[0] - lo, start[1]] = 1
    out = [x]
    for _ in range(n_steps):
        y = np.zeros((ncells, s), dtype=object)
        y[:] = 0
        for di in range(2 * b + 1):
            d = di - b
            l, h = max(0, -d), min(ncells, ncells - d)
            if l >= h:
                continue
            if forward:
                y[l + d:h + d] += x[l:h].dot(blocks[di])
            else:
                y[l:h] += x[l + d:h + d].dot(blocks[di].T)
        x = y
        out.append(x)
    return lo, out


def _finite_vectors(ts: FiniteStructure, start: int, n_steps: int, forward: bool):
    A = ts.array()
    x = np.zeros(len(ts), dtype=object)
    x[:] = 0
    x[start] = 1
    out = [x]
    for _ in range(n_steps):
        x = x.dot(A) if forward else A.dot(x)
        out.append(x)
    return out


def _locate(ts, lo, state):
    return (state[0] - lo, state[1])


def path_counts(ts, a, n_max: int, b=None, mode: str = "exact") -> PathCountTable:
    """Exact (or log-scaled float) p_ab, p_a. and p_.b for n = 0..n_max.

    ``mode`` is "exact", "scaled" or "auto" (exact up to n_max = 60).
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    if mode == "auto":
        mode = "exact" if n_max <= EXACT_LIMIT else "scaled"
    a = parse_state(ts, a)
    b = a if b is None else parse_state(ts, b)
    if mode == "scaled":
        return _scaled_counts(ts, a, b, n_max)
    if isinstance(ts, BandedStructure):
        radius = n_max * ts.band + abs(b[0] - a[0])
        lo, fwd = _banded_vectors(ts, a, n_max, True, radius)
        lo2, bwd = _banded_vectors(ts, b, n_max, False, radius)
        loops = [int(v[_locate(ts, lo, b)]) for v in fwd]
        row = [int(v.sum()) for v in fwd]
        col = [int(v.sum()) for v in bwd]
    else:
        ia, ib = ts.index(a), ts.index(b)
        fwd = _finite_vectors(ts, ia, n_max, True)
        bwd = _finite_vectors(ts, ib, n_max, False)
        loops = [int(v[ib]) for v in fwd]
        row = [int(v.sum()) for v in fwd]
        col = [int(v.sum()) for v in bwd]
    return PathCountTable(a, b, loops, row, col, exact=True)


def _scaled_counts(ts, a, b, n_max: int) -> PathCountTable:
    if isinstance(ts, BandedStructure):
        blocks = ts.block_array(dtype=float)
        s = ts.states_per_cell
        radius = n_max * ts.band + abs(b[0] - a[0])
        lo, ncells = _window(ts, a, radius)
        x0 = np.zeros((ncells, s))
        x0[a[0] - lo, a[1]] = 1.0
        loops, row = kernels.banded_scaled_run(x0, blocks, ts.band, n_max, b[0] - lo, b[1], True)
        lo2, _ = _window(ts, b, radius)
        y0 = np.zeros((ncells, s))
        y0[b[0] - lo2, b[1]] = 1.0
        _, col = kernels.banded_scaled_run(y0, blocks, ts.band, n_max, 0, 0, False)
        return PathCountTable(a, b, [float(v) for v in loops], [float(v) for v in row],
                              [float(v) for v in col], exact=False)
    A = np.array(ts.matrix, dtype=float)
    ia, ib = ts.index(a), ts.index(b)
    res = {}
    for key, start, forward in (("f", ia, True), ("b", ib, False)):
        x = np.zeros(len(ts))
        x[start] = 1.0
        logscale, anchor_log, total_log = 0.0, [], []
        for n in range(n_max + 1):
            if n:
                x = x @ A if forward else A @ x
                m = x.max()
                if m <= 0:
                    x[:] = 0
                else:
                    x /= m
                    logscale += math.log(m)
            with np.errstate(divide="ignore"):
                anchor_log.append(float(np.log(x[ib])) + logscale)
                total_log.append(float(np.log(x.sum())) + logscale)
        res[key] = (anchor_log, total_log)
    return PathCountTable(a, b, res["f"][0], res["f"][1], res["b"][1], exact=False)


@dataclass
class TabooVectors:
    """First-entrance data for anchor a.

    ``vectors[n][k]`` counts paths of length n from state ``states[k]`` to a
    that avoid a at times 0..n-1 (so the entry at a is 0 for n >= 1);
    ``first_return[n]`` counts loops at a of length n avoiding a at times 1..n-1.
    """

    states: list
    vectors: list
    first_return: list


def taboo_vectors(ts, a, n_max: int) -> TabooVectors:
    a = parse_state(ts, a)
    if isinstance(ts, BandedStructure):
        s, b = ts.states_per_cell, ts.band
        radius = n_max * b + abs(a[0])
        lo, ncells = _window(ts, a, radius)
        blocks = ts.block_array()
        states = [(lo + c, i) for c in range(ncells) for i in range(s)]
        pos = (a[0] - lo, a[1])
        x = np.zeros((ncells, s), dtype=object)
        x[:] = 0
        x[pos] = 1
        out, ret = [x.reshape(-1).copy()], [0]
        for _ in range(n_max):
            y = np.zeros((ncells, s), dtype=object)
            y[:] = 0
            for di in range(2 * b + 1):
                d = di - b
                l, h = max(0, -d), min(ncells, ncells - d)
                if l < h:
                    y[l:h] += x[l + d:h + d].dot(blocks[di].T)
            ret.append(int(y[pos]))
            y[pos] = 0
            x = y
            out.append(x.reshape(-1).copy())
        return TabooVectors(states, out, ret)
    A = ts.array()
    ia = ts.index(a)
    x = np.zeros(len(ts), dtype=object)
    x[:] = 0
    x[ia] = 1
    out, ret = [x.copy()], [0]
    for _ in range(n_max):
        x = A.dot(x)
        ret.append(int(x[ia]))
        x[ia] = 0
        out.append(x.copy())
    return TabooVectors(list(ts.states), out, ret)


def taboo_counts(ts, a, n_max: int) -> list:
    """First-entrance counts fe^(n) = #{paths of length n ending at a, not visiting a before}; fe^(0) = 1."""
    return [int(v.sum()) for v in taboo_vectors(ts, a, n_max).vectors]


@dataclass(frozen=True)
class IdentityReport:
    ok: bool
    checked: int
    first_failure: int | None = None
    detail: str = ""


def convolution_identity_check(ts, a, n_max: int, counts: PathCountTable | None = None,
                               first_entrance: list | None = None) -> IdentityReport:
    """Check p_.a^(n) = sum_k fe^(k) p_aa^(n-k) exactly for n <= n_max."""
    if counts is None:
        counts = path_counts(ts, a, n_max)
    if not counts.exact:
        raise ValueError("identity checks need exact counts")
    fe = first_entrance if first_entrance is not None else taboo_counts(ts, a, n_max)
    for n in range(n_max + 1):
        rhs = sum(fe[k] * counts.loops[n - k] for k in range(n + 1))
        if counts.col[n] != rhs:
            return IdentityReport(False, n + 1, n, f"p_.a({n}) = {counts.col[n]} but convolution gives {rhs}")
    return IdentityReport(True, n_max + 1)


# ---------------------------------------------------------------------------
# entropies
# ---------------------------------------------------------------------------

@dataclass
class EntropyEstimates:
    """Per-n estimates of the three path-count growth rates (natural log).

    These are finite-n estimates of a limsup; ``None`` marks an n where a
    count vanished (listed in ``zero_counts``).
    """

    estimator: str
    gurevich: list
    salama: list
    revsalama: list
    zero_counts: dict

    @property
    def last(self) -> dict:
        def last_defined(seq):
            for v in reversed(seq):
                if v is not None:
                    return v
            return None
        return {"gurevich": last_defined(self.gurevich), "salama": last_defined(self.salama),
                "revsalama": last_defined(self.revsalama)}


def _logs(seq, exact):
    if not exact:
        return [v if v != -math.inf else None for v in seq]
    return [math.log(v) if v > 0 else None for v in seq]


def _estimates(seq, exact, estimator, n_max):
    """Sequence indexed n = 1..n_max (entry 0 of the result is n = 1)."""
    out = []
    if estimator == "root":
        logs = _logs(seq, exact)
        for n in range(1, n_max + 1):
            out.append(None if logs[n] is None else logs[n] / n)
        return out
    for n in range(1, n_max + 1):
        p0, p1 = seq[n], seq[n + 1]
        if exact:
            out.append(math.log(p1 / p0) if p0 > 0 and p1 > 0 else None)
        else:
            out.append(p1 - p0 if p0 != -math.inf and p1 != -math.inf else None)
    return out


def entropy_estimates(ts, a, n_max: int, estimator: str = "ratio", mode: str = "auto") -> EntropyEstimates:
    """Gurevich (loops), Salama (rows) and reverse Salama (columns) estimates.

    ``root``: (1/n) log p^(n).  ``ratio``: log(p^(n+1) / p^(n)).  Both are
    reported for n = 1..n_max.
    """
    if estimator not in ("root", "ratio"):
        raise ValueError("estimator must be 'root' or 'ratio'")
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    depth = n_max + 1 if estimator == "ratio" else n_max
    counts = path_counts(ts, a, depth, mode=mode)
    ex = counts.exact
    res = {}
    zeros = {}
    for name, seq in (("gurevich", counts.loops), ("salama", counts.row), ("revsalama", counts.col)):
        res[name] = _estimates(seq, ex, estimator, n_max)
        zeros[name] = [n + 1 for n, v in enumerate(res[name]) if v is None]
    return EntropyEstimates(estimator, res["gurevich"], res["salama"], res["revsalama"], zeros)
