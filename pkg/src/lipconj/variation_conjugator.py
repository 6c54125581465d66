"""Conjugacy to a map with Lipschitz constant close to the variation growth rate.

The homeomorphism is the normalized truncated series

    phi_N(x) = sum_{n=0}^{N} Var f^n|[0,x] / (nu + eps)^n,

evaluated exactly on a finite table of points; the conjugate map is the
piecewise-affine map through (phi(x), phi(f(x))).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .pwl_map import (BREAKPOINT_CAP, IteratedVariation, MonotoneTable, PwlMap, as_rational,
                      fmt_rational, iterate)

__all__ = ["MonotoneTable", "VariationConjugacyResult", "phi_construct", "conjugate_by",
           "variation_conjugacy", "table_points", "slope_certificate"]


@dataclass(frozen=True)
class VariationConjugacyResult:
    phi: MonotoneTable
    g: PwlMap
    epsilon: Fraction
    N: int
    lip_g: Fraction
    tail_bound: float

    def to_json(self) -> dict:
        return {"phi": self.phi.to_json(), "g": self.g.to_json(),
                "lip": fmt_rational(self.lip_g), "tail_bound": self.tail_bound,
                "epsilon": fmt_rational(self.epsilon), "N": self.N}


def table_points(f: PwlMap, depth: int, cap: int = BREAKPOINT_CAP) -> list:
    """Breakpoints of f^depth (at least those of f) together with their images."""
    base = iterate(f, max(depth, 1), cap=cap).breakpoints
    pts = set(base)
    pts.update(f(x) for x in base)
    return sorted(pts)


def _check_nu(var: IteratedVariation, c_nu: Fraction, N: int) -> None:
    for n in range(1, N + 1):
        if var.total(n) > c_nu**n:
            raise ValueError(f"nu={c_nu} is below the observed growth: Var f^{n} = {var.total(n)}")


def phi_construct(f: PwlMap, nu, epsilon, N: int, depth: int = 4,
                  points=None, cap: int = BREAKPOINT_CAP) -> MonotoneTable:
    """Normalized truncated phi on ``points`` (default: :func:`table_points`)."""
    nu, epsilon = as_rational(nu), as_rational(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if N < 0:
        raise ValueError("N must be nonnegative")
    var = IteratedVariation(f, cap=cap)
    _check_nu(var, nu, N)
    c = nu + epsilon
    weights = [c**-n for n in range(N + 1)]

    def raw(x):
        return sum(var(n, x) * w for n, w in enumerate(weights))

    pts = sorted(set(as_rational(p) for p in (points if points is not None else table_points(f, depth, cap))) | {Fraction(0), Fraction(1)})
    scale = raw(Fraction(1))
    return MonotoneTable(pts, [raw(x) / scale for x in pts])


def conjugate_by(f: PwlMap, phi: MonotoneTable) -> PwlMap:
    """PWL map through (phi(x), phi(f(x))) for table points x whose image is tabulated.

    Every breakpoint of f must be such a point, so f is affine between
    consecutive nodes.
    """
    nodes = [x for x in phi.xs if f(x) in phi]
    missing = [b for b in f.breakpoints if b not in phi or f(b) not in phi]
    if missing:
        raise ValueError(f"table does not cover breakpoints {missing[:3]} and their images")
    return PwlMap([phi(x) for x in nodes], [phi(f(x)) for x in nodes], warn_contraction=False)


def slope_certificate(f: PwlMap, nu, epsilon, N: int, phi: MonotoneTable) -> list:
    """Exact per-cell bound on the slopes of the conjugate.

    For a cell J = [u, v] between adjacent nodes (f monotone on J), with
    c = nu + eps and Phi_N the unnormalized sum,

        Phi_N(f(J)) <= c (Phi_N(J) - |J| + Var f^(N+1)|J / c^(N+1)),

    because Var f^n|f(J) <= Var f^(n+1)|J.  Returns (u, v, slope, bound).
    """
    nu, epsilon = as_rational(nu), as_rational(epsilon)
    c = nu + epsilon
    var = IteratedVariation(f)
    nodes = [x for x in phi.xs if f(x) in phi]
    out = []
    for u, v in zip(nodes, nodes[1:]):
        raw = sum(var.on(n, u, v) * c**-n for n in range(N + 1))
        excess = var.on(N + 1, u, v) * c ** -(N + 1) - (v - u)
        bound = c * (1 + max(excess, Fraction(0)) / raw)
        slope = abs(phi(f(v)) - phi(f(u))) / (phi(v) - phi(u))
        out.append((u, v, slope, bound))
    return out


def tail_bound(f: PwlMap, nu, epsilon, N: int) -> float:
    """Geometric tail sum_{n>N} (est/(nu+eps))^n with est = (Var f^N)^(1/N)."""
    nu, epsilon = as_rational(nu), as_rational(epsilon)
    if N < 1:
        return math.inf
    var = IteratedVariation(f)
    v = var.total(N)
    est = math.exp((math.log(v.numerator) - math.log(v.denominator)) / N)
    r = est / float(nu + epsilon)
    return math.inf if r >= 1 else r ** (N + 1) / (1 - r)


def variation_conjugacy(f: PwlMap, nu, epsilon, N: int, depth: int = 4,
                        cap: int = BREAKPOINT_CAP) -> VariationConjugacyResult:
    phi = phi_construct(f, nu, epsilon, N, depth=depth, cap=cap)
    g = conjugate_by(f, phi)
    return VariationConjugacyResult(phi, g, as_rational(epsilon), N, g.lipschitz_constant(),
                                    tail_bound(f, nu, epsilon, N))
