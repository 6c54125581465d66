"""Exact piecewise-linear interval maps, their lifts, and a few closed-form maps.

All piecewise-linear data are :class:`fractions.Fraction`; floats appear only
for roots, logarithms and the analytic families.
"""
from __future__ import annotations

import bisect
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import ResourceLimitError, WindowError

Rational = Fraction

BREAKPOINT_CAP = 10**6
PREIMAGE_CAP = 10**7


class UniformContractionWarning(UserWarning):
    """The map has Lipschitz constant below one."""


def as_rational(x) -> Fraction:
    """Coerce ints, ``"p/q"`` strings, Fractions and floats to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (float, np.floating)):
        if not math.isfinite(x):
            raise ValueError(f"not a finite number: {x!r}")
        return Fraction(repr(float(x)))
    raise TypeError(f"cannot interpret {x!r} as a rational")


def fmt_rational(q: Fraction) -> str:
    """"p/q", or "p" for integers."""
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------------------
# types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PwlMap:
    """Continuous map of [0, 1], affine between consecutive breakpoints."""

    breakpoints: tuple
    values: tuple
    warn_contraction: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        xs = tuple(as_rational(x) for x in self.breakpoints)
        ys = tuple(as_rational(y) for y in self.values)
        object.__setattr__(self, "breakpoints", xs)
        object.__setattr__(self, "values", ys)
        if len(xs) < 2 or len(xs) != len(ys):
            raise ValueError("need at least two breakpoints and one value per breakpoint")
        if xs[0] != 0 or xs[-1] != 1:
            raise ValueError("breakpoints must start at 0 and end at 1")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if any(y < 0 or y > 1 for y in ys):
            raise ValueError("values must lie in [0, 1]")
        if self.warn_contraction and self.lipschitz_constant() < 1:
            warnings.warn("map is a uniform contraction (Lipschitz constant < 1)",
                          UniformContractionWarning, stacklevel=3)

    def __call__(self, x):
        return eval_map(self, x)

    def __len__(self):
        return len(self.breakpoints)

    @property
    def slopes(self) -> tuple:
        xs, ys = self.breakpoints, self.values
        return tuple((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]) for i in range(len(xs) - 1))

    def pieces(self):
        xs, ys = self.breakpoints, self.values
        return [(xs[i], xs[i + 1], ys[i], ys[i + 1]) for i in range(len(xs) - 1)]

    def lipschitz_constant(self) -> Fraction:
        return max(abs(s) for s in self.slopes)

    def range_on(self, a, b) -> tuple[Fraction, Fraction]:
        """Exact (min, max) of the map over [a, b]."""
        a, b = as_rational(a), as_rational(b)
        if a > b:
            a, b = b, a
        xs = self.breakpoints
        i, j = bisect.bisect_right(xs, a), bisect.bisect_left(xs, b)
        vals = [self(a), self(b)] + list(self.values[i:j])
        return min(vals), max(vals)

    def simplify(self) -> "PwlMap":
        """Drop interior breakpoints where the slope does not change."""
        xs, ys = list(self.breakpoints), list(self.values)
        kx, ky = [xs[0]], [ys[0]]
        for i in range(1, len(xs) - 1):
            s_left = (ys[i] - ky[-1]) / (xs[i] - kx[-1])
            s_right = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])
            if s_left != s_right:
                kx.append(xs[i])
                ky.append(ys[i])
        kx.append(xs[-1])
        ky.append(ys[-1])
        return PwlMap(kx, ky, warn_contraction=False)

    def to_json(self) -> dict:
        return {"breakpoints": [fmt_rational(x) for x in self.breakpoints],
                "values": [fmt_rational(y) for y in self.values]}

    @classmethod
    def from_json(cls, obj: dict) -> "PwlMap":
        return cls(obj["breakpoints"], obj["values"])

    @classmethod
    def from_points(cls, points: Iterable) -> "PwlMap":
        pts = list(points)
        return cls([p[0] for p in pts], [p[1] for p in pts])


@dataclass(frozen=True)
class PeriodicLift:
    """Degree-one lift F of a circle-like map to the real line.

    ``turning`` lists (offset, value) pairs for one period; the graph is
    extended by F(x + 1) = F(x) + 1 and is affine between consecutive
    listed points (the last point connects to the first one of the next cell).
    """

    turning: tuple

    def __post_init__(self):
        pts = tuple((as_rational(o), as_rational(v)) for o, v in self.turning)
        object.__setattr__(self, "turning", pts)
        if not pts:
            raise ValueError("need at least one turning point")
        offs = [o for o, _ in pts]
        if any(o < 0 or o >= 1 for o in offs):
            raise ValueError("turning offsets must lie in [0, 1)")
        if any(b <= a for a, b in zip(offs, offs[1:])):
            raise ValueError("turning offsets must be strictly increasing")

    def __call__(self, x):
        return eval_map(self, x)

    def segments(self):
        """Segments (o0, o1, v0, v1) covering one period [o_first, o_first + 1]."""
        pts = list(self.turning) + [(self.turning[0][0] + 1, self.turning[0][1] + 1)]
        return [(pts[i][0], pts[i + 1][0], pts[i][1], pts[i + 1][1]) for i in range(len(pts) - 1)]

    def lipschitz_constant(self) -> Fraction:
        return max(abs((v1 - v0) / (o1 - o0)) for o0, o1, v0, v1 in self.segments())

    def to_json(self) -> dict:
        return {"turning": [[fmt_rational(o), fmt_rational(v)] for o, v in self.turning]}

    @classmethod
    def from_json(cls, obj: dict) -> "PeriodicLift":
        return cls(tuple(tuple(p) for p in obj["turning"]))


@dataclass(frozen=True)
class AnalyticMap:
    """Closed-form maps: ``power`` x -> x**t and ``psi_t`` x -> exp(-(ln 1/x)**log2(t))."""

    family: str
    t: float

    def __post_init__(self):
        if self.family not in ("power", "psi_t"):
            raise ValueError(f"unknown family {self.family!r}")
        if not float(self.t) > 0:
            raise ValueError("t must be positive")

    def __call__(self, x):
        return eval_map(self, x)

    def to_json(self) -> dict:
        return {"family": self.family, "t": float(self.t)}


@dataclass(frozen=True)
class MonotoneTable:
    """Strictly increasing table of (x, y) pairs pinned at (0, 0) and (1, 1).

    Evaluation is exact at table points and piecewise-affine in between.
    """

    xs: tuple
    ys: tuple
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        xs = tuple(as_rational(x) for x in self.xs)
        ys = tuple(as_rational(y) for y in self.ys)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        if len(xs) != len(ys) or len(xs) < 2:
            raise ValueError("table needs at least two pairs")
        if (xs[0], ys[0], xs[-1], ys[-1]) != (0, 0, 1, 1):
            raise ValueError("table must start at (0, 0) and end at (1, 1)")
        if any(b <= a for a, b in zip(xs, xs[1:])) or any(b <= a for a, b in zip(ys, ys[1:])):
            raise ValueError("table must be strictly increasing in both coordinates")
        object.__setattr__(self, "_index", dict(zip(xs, ys)))

    def __len__(self):
        return len(self.xs)

    def __contains__(self, x) -> bool:
        return as_rational(x) in self._index

    def __call__(self, x):
        if isinstance(x, np.ndarray):
            return kernels.pwl_eval(np.array(self.xs, dtype=float), np.array(self.ys, dtype=float),
                                    x.astype(float))
        if isinstance(x, (float, np.floating)):
            return float(np.interp(x, np.array(self.xs, dtype=float), np.array(self.ys, dtype=float)))
        x = as_rational(x)
        y = self._index.get(x)
        if y is not None:
            return y
        return _interp(self.xs, self.ys, x)

    def inverse(self, y):
        y = as_rational(y)
        return _interp(self.ys, self.xs, y)

    def pairs(self):
        return list(zip(self.xs, self.ys))

    def as_pwl(self) -> PwlMap:
        return PwlMap(self.xs, self.ys, warn_contraction=False)

    def to_json(self) -> dict:
        return {"pairs": [[fmt_rational(x), fmt_rational(y)] for x, y in zip(self.xs, self.ys)]}

    @classmethod
    def from_json(cls, obj: dict) -> "MonotoneTable":
        return cls([p[0] for p in obj["pairs"]], [p[1] for p in obj["pairs"]])

    @classmethod
    def identity(cls) -> "MonotoneTable":
        return cls((0, 1), (0, 1))


def map_from_json(obj: dict):
    """Build a PwlMap, PeriodicLift or AnalyticMap from its JSON form."""
    if "breakpoints" in obj:
        return PwlMap.from_json(obj)
    if "turning" in obj:
        return PeriodicLift.from_json(obj)
    if "family" in obj:
        return AnalyticMap(obj["family"], float(obj["t"]))
    if "pairs" in obj:
        return MonotoneTable.from_json(obj)
    raise ValueError("unrecognised map JSON object")


# ---------------------------------------------------------------------------
# named maps
# ---------------------------------------------------------------------------

def identity_map() -> PwlMap:
    return PwlMap((0, 1), (0, 1))


def tent_map() -> PwlMap:
    return PwlMap((0, Fraction(1, 2), 1), (0, 1, 0))


def two_lap_map(turn=Fraction(3, 5)) -> PwlMap:
    """Full two-branch map rising on [0, turn] and falling on [turn, 1]."""
    return PwlMap((0, turn, 1), (0, 1, 0))


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _interp(xs, ys, x):
    i = bisect.bisect_right(xs, x) - 1
    if i < 0 or x > xs[-1]:
        raise ValueError(f"{x} outside [{xs[0]}, {xs[-1]}]")
    if i == len(xs) - 1:
        return ys[-1]
    return ys[i] + (ys[i + 1] - ys[i]) * (x - xs[i]) / (xs[i + 1] - xs[i])


def eval_map(m, x):
    """Evaluate a PwlMap, PeriodicLift or AnalyticMap at x.

    PWL maps are exact on rationals (ints, strings and Fractions) and fall back
    to float interpolation for float input.
    """
    if isinstance(m, PwlMap):
        if isinstance(x, np.ndarray):
            return kernels.pwl_eval(np.array(m.breakpoints, dtype=float),
                                    np.array(m.values, dtype=float), x.astype(float))
        if isinstance(x, (float, np.floating)):
            if not 0.0 <= x <= 1.0:
                raise ValueError(f"{x} outside [0, 1]")
            return float(np.interp(x, np.array(m.breakpoints, dtype=float), np.array(m.values, dtype=float)))
        return _interp(m.breakpoints, m.values, as_rational(x))
    if isinstance(m, PeriodicLift):
        floating = isinstance(x, (float, np.floating))
        q = Fraction(x) if floating else as_rational(x)
        o_first = m.turning[0][0]
        z = math.floor(q - o_first)
        off = q - z
        for o0, o1, v0, v1 in m.segments():
            if o0 <= off <= o1:
                y = z + v0 + (v1 - v0) * (off - o0) / (o1 - o0)
                return float(y) if floating else y
        raise AssertionError("offset not covered by one period")  # pragma: no cover
    if isinstance(m, AnalyticMap):
        arr = np.asarray(x, dtype=float)
        if np.any((arr < 0) | (arr > 1)):
            raise ValueError("analytic maps are defined on [0, 1]")
        if m.family == "power":
            out = arr ** float(m.t)
        else:
            expo = math.log2(float(m.t))
            with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
                inner = np.log(1.0 / np.where(arr > 0, arr, 1.0))
                out = np.exp(-inner ** expo)
            out = np.where(arr <= 0, 0.0, np.where(arr >= 1, 1.0, out))
        return float(out) if out.ndim == 0 else out
    if isinstance(m, MonotoneTable):
        return m(x)
    raise TypeError(f"cannot evaluate {type(m).__name__}")


def lipschitz_constant(m) -> Fraction:
    return m.lipschitz_constant()


# ---------------------------------------------------------------------------
# composition and iteration
# ---------------------------------------------------------------------------

def compose(outer: PwlMap, inner: PwlMap, cap: int = BREAKPOINT_CAP) -> PwlMap:
    """Exact PWL form of ``outer o inner``."""
    obx = outer.breakpoints
    pts = set(inner.breakpoints)
    for u, v, a, b in inner.pieces():
        if a == b:
            continue
        lo, hi = (a, b) if a < b else (b, a)
        i, j = bisect.bisect_right(obx, lo), bisect.bisect_left(obx, hi)
        for p in obx[i:j]:
            pts.add(u + (p - a) * (v - u) / (b - a))
        if len(pts) > cap:
            raise ResourceLimitError(f"composition exceeds {cap} breakpoints")
    xs = sorted(pts)
    return PwlMap(xs, [outer(inner(x)) for x in xs], warn_contraction=False)


def iterate(f: PwlMap, n: int, cap: int = BREAKPOINT_CAP) -> PwlMap:
    """Exact PWL form of the n-th iterate; breakpoints are the union of f^-j(B), j < n."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    g = identity_map()
    for _ in range(n):
        g = compose(g, f, cap=cap)
    return g


# ---------------------------------------------------------------------------
# variation
# ---------------------------------------------------------------------------

def variation_on_prefix(f: PwlMap, x) -> Fraction:
    """Total variation of f on [0, x]."""
    x = as_rational(x)
    if not 0 <= x <= 1:
        raise ValueError("x must lie in [0, 1]")
    xs, ys = f.breakpoints, f.values
    total = Fraction(0)
    for i in range(len(xs) - 1):
        if xs[i + 1] <= x:
            total += abs(ys[i + 1] - ys[i])
        else:
            if xs[i] < x:
                total += abs(f(x) - ys[i])
            break
    return total


def total_variation(f: PwlMap) -> Fraction:
    return variation_on_prefix(f, 1)


def variation_on(f: PwlMap, a, b) -> Fraction:
    a, b = as_rational(a), as_rational(b)
    if a > b:
        a, b = b, a
    return variation_on_prefix(f, b) - variation_on_prefix(f, a)


class IteratedVariation:
    """Exact Var f^n on [0, x] without materializing f^n.

    Uses Var f^n|[0,x] = sum over laps [a, b] of f inside [0, x] of
    |V_{n-1}(f(b)) - V_{n-1}(f(a))|, memoized on (n, x).  Only the forward
    orbits of x and of the breakpoint images are ever visited.
    """

    def __init__(self, f: PwlMap, cap: int = BREAKPOINT_CAP):
        self.f = f
        self.cap = cap
        self._memo: dict = {}
        self._images = [f(b) for b in f.breakpoints]

    def __call__(self, n: int, x) -> Fraction:
        x = as_rational(x)
        if n == 0:
            return x
        key = (n, x)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if len(self._memo) > self.cap:
            raise ResourceLimitError("variation memo exceeds cap")
        xs, imgs = self.f.breakpoints, self._images
        total = Fraction(0)
        for i in range(len(xs) - 1):
            if xs[i] >= x:
                break
            right_img = imgs[i + 1] if xs[i + 1] <= x else self.f(x)
            total += abs(self(n - 1, right_img) - self(n - 1, imgs[i]))
        self._memo[key] = total
        return total

    def on(self, n: int, a, b) -> Fraction:
        a, b = as_rational(a), as_rational(b)
        if a > b:
            a, b = b, a
        return self(n, b) - self(n, a)

    def total(self, n: int) -> Fraction:
        return self(n, Fraction(1))


@dataclass(frozen=True)
class VariationGrowth:
    rows: list  # (n, Var f^n, (Var f^n)**(1/n))
    estimate: float


def variation_growth(f: PwlMap, n_max: int, cap: int = BREAKPOINT_CAP) -> VariationGrowth:
    """Exact Var f^n for n = 1..n_max with the n-th roots as floats.

    The last root is reported as the estimate of the growth rate; no claim of
    convergence is made.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    var = IteratedVariation(f, cap=cap)
    rows = []
    for n in range(1, n_max + 1):
        v = var.total(n)
        rows.append((n, v, math.exp(_log_rational(v) / n)))
    return VariationGrowth(rows, rows[-1][2])


def _log_rational(q: Fraction) -> float:
    return math.log(q.numerator) - math.log(q.denominator)


# ---------------------------------------------------------------------------
# preimages
# ---------------------------------------------------------------------------

def _pwl_inverse(f: PwlMap, y: Fraction) -> list:
    out = []
    for u, v, a, b in f.pieces():
        lo, hi = (a, b) if a <= b else (b, a)
        if lo <= y <= hi:
            if a == b:
                raise ValueError(f"{y} has a whole interval of preimages")
            out.append(u + (y - a) * (v - u) / (b - a))
    return out


def _lift_inverse(F: PeriodicLift, y: Fraction) -> list:
    segs = F.segments()
    vmin = min(min(v0, v1) for _, _, v0, v1 in segs)
    vmax = max(max(v0, v1) for _, _, v0, v1 in segs)
    out = []
    for z in range(math.ceil(y - vmax), math.floor(y - vmin) + 1):
        w = y - z
        for o0, o1, v0, v1 in segs:
            lo, hi = (v0, v1) if v0 <= v1 else (v1, v0)
            if lo <= w <= hi:
                if v0 == v1:
                    raise ValueError(f"{y} has a whole interval of preimages")
                out.append(z + o0 + (w - v0) * (o1 - o0) / (v1 - v0))
    return out


def preimages(m, x, n: int, window: Sequence | None = None, cap: int = PREIMAGE_CAP) -> list:
    """Sorted exact solution set of m^n(y) = x.

    For a PeriodicLift, ``window`` = (lo, hi) certifies that every preimage
    found lies in [lo, hi]; a preimage outside raises WindowError.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    x = as_rational(x)
    if isinstance(m, PwlMap):
        if not 0 <= x <= 1:
            raise ValueError("x must lie in [0, 1]")
        inv = lambda y: _pwl_inverse(m, y)
    elif isinstance(m, PeriodicLift):
        inv = lambda y: _lift_inverse(m, y)
    else:
        raise TypeError("preimages need a PwlMap or PeriodicLift")
    lo = hi = None
    if window is not None:
        lo, hi = as_rational(window[0]), as_rational(window[1])
    level = {x}
    for _ in range(n):
        nxt = set()
        for y in level:
            nxt.update(inv(y))
        if len(nxt) > cap:
            raise ResourceLimitError(f"more than {cap} preimages")
        if lo is not None and any(p < lo or p > hi for p in nxt):
            raise WindowError("a preimage leaves the window; enlarge it")
        level = nxt
    return sorted(level)


def _lcm(values) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


def preimage_count(f: PwlMap, x, n: int, cap: int = PREIMAGE_CAP) -> int:
    """#f^-n(x) for a PwlMap, via the int64 common-denominator kernel.

    Falls back to exact Fraction enumeration when the denominators would not
    fit in 64 bits.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    x = as_rational(x)
    pieces = f.pieces()
    coeffs = [(v - u) / (b - a) if a != b else Fraction(0) for u, v, a, b in pieces]
    mult = _lcm([u.denominator for u, _, _, _ in pieces] + [c.denominator for c in coeffs])
    d0 = _lcm([x.denominator] + [y.denominator for y in f.values])
    xm = [u * mult for u, _, _, _ in pieces]
    cm = [c * mult for c in coeffs]
    worst = d0 * mult ** max(n - 1, 0) * (max(abs(int(v)) for v in xm) + 2 * max(abs(int(c)) for c in cm) + 1)
    if worst >= kernels.INT64_SAFE or d0 * mult**n >= kernels.INT64_SAFE:
        return len(preimages(f, x, n, cap=cap))
    xm_arr = np.array([int(v) for v in xm], dtype=np.int64)
    cm_arr = np.array([int(c) for c in cm], dtype=np.int64)
    level = np.array([int(x * d0)], dtype=np.int64)
    d = d0
    for _ in range(n):
        ylo = np.array([int(a * d) for _, _, a, _ in pieces], dtype=np.int64)
        yhi = np.array([int(b * d) for _, _, _, b in pieces], dtype=np.int64)
        level, flat_hit = kernels.preimage_step(level, np.int64(d), ylo, yhi, xm_arr, cm_arr)
        if flat_hit:
            raise ValueError("a point has a whole interval of preimages")
        if level.shape[0] > cap:
            raise ResourceLimitError(f"more than {cap} preimages")
        d *= mult
    return int(level.shape[0])


# ---------------------------------------------------------------------------
# conjugacy residual
# ---------------------------------------------------------------------------

def _as_float_fn(m):
    if isinstance(m, PwlMap):
        bx = np.array(m.breakpoints, dtype=float)
        by = np.array(m.values, dtype=float)
        return lambda arr: kernels.pwl_eval(bx, by, arr)
    if isinstance(m, MonotoneTable):
        bx = np.array(m.xs, dtype=float)
        by = np.array(m.ys, dtype=float)
        return lambda arr: kernels.pwl_eval(bx, by, arr)
    if isinstance(m, AnalyticMap):
        return lambda arr: np.asarray(eval_map(m, arr), dtype=float)
    if callable(m):
        return lambda arr: np.array([float(m(float(t))) for t in arr])
    raise TypeError(f"cannot evaluate {type(m).__name__}")


def check_conjugacy(f, g, psi, grid) -> float:
    """sup over the grid of |psi(f(x)) - g(psi(x))|."""
    pts = np.asarray([float(t) for t in grid], dtype=float)
    fe, ge, pe = _as_float_fn(f), _as_float_fn(g), _as_float_fn(psi)
    lhs = pe(np.clip(fe(pts), 0.0, 1.0))
    rhs = ge(np.clip(pe(pts), 0.0, 1.0))
    return float(np.max(np.abs(lhs - rhs))) if pts.size else 0.0
