"""Command-line front end.

Every subcommand prints one JSON document to stdout.  Exit status: 0 on
success, 1 when a computed property fails, 2 on invalid input, 3 when a
resource cap is hit.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from fractions import Fraction

from . import __version__
from .errors import DivergenceError, ResourceLimitError
from .gap_example import run_gap_pipeline, vertex_edge_count_bridge, build_example
from .markov_chain import (MarkovSystem, convolution_identity_check, entropy_estimates,
                           parse_state, path_counts, structure_from_json, taboo_counts)
from .markov_conjugator import (build_conjugate, cylinder_diameter_decay, identity_checks,
                                lambda_ratios, psi_on_refinement, round_trip)
from .pwl_map import (AnalyticMap, PeriodicLift, PwlMap, as_rational, check_conjugacy,
                      fmt_rational, map_from_json, preimage_count, preimages, tent_map,
                      variation_growth, total_variation, iterate)
from .subeigen import pruitt_construct, summability, verify_subeigenvector
from .variation_conjugator import variation_conjugacy


class CheckFailed(Exception):
    """A computed property did not hold; the payload is still printed."""

    def __init__(self, payload):
        super().__init__("check failed")
        self.payload = payload


def jsonable(obj):
    if isinstance(obj, Fraction):
        return fmt_rational(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return str(obj) if abs(obj) > 2**53 else obj
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else str(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj, key=str) if isinstance(obj, (set, frozenset)) else obj
        return [jsonable(v) for v in items]
    if hasattr(obj, "to_json"):
        return jsonable(obj.to_json())
    return str(obj)


def _load(path):
    with open(path) as fh:
        return json.load(fh)


def _rational_list(text):
    return [as_rational(t) for t in text.split(",")]


def _write_csv(path, rows):
    if not path:
        return
    with open(path, "w", newline="") as fh:
        csv.writer(fh).writerows([[str(c) for c in r] for r in rows])


def _need_pwl(m):
    if not isinstance(m, PwlMap):
        raise ValueError("this command needs a piecewise-linear map of [0, 1]")
    return m


# ---------------------------------------------------------------------------
# map
# ---------------------------------------------------------------------------

def cmd_map_var(args):
    f = _need_pwl(map_from_json(_load(args.inp)))
    vg = variation_growth(f, args.n)
    rows = [(n, v) for n, v, _ in vg.rows]
    _write_csv(args.csv, [("n", "var")] + rows)
    return {"rows": rows, "growth_estimate": vg.estimate}


def cmd_map_lip(args):
    m = map_from_json(_load(args.inp))
    if isinstance(m, (PwlMap, PeriodicLift)):
        return {"lip": m.lipschitz_constant()}
    raise ValueError("Lipschitz constant is exact only for piecewise-linear maps")


def cmd_map_preimages(args):
    m = map_from_json(_load(args.inp))
    x = as_rational(args.x)
    rows = []
    for n in range(1, args.n + 1):
        if isinstance(m, PwlMap) and not args.enumerate:
            c = preimage_count(m, x, n)
        else:
            window = _rational_list(args.window) if args.window else None
            c = len(preimages(m, x, n, window=window))
        growth = math.log(c) / n if c else None
        rows.append((n, c, growth))
    _write_csv(args.csv, [("n", "count", "growth")] + rows)
    return {"x": x, "rows": rows}


def cmd_map_conjugate_variation(args):
    f = _need_pwl(map_from_json(_load(args.inp)))
    res = variation_conjugacy(f, args.nu, args.epsilon, args.N, depth=args.depth)
    out = res.to_json()
    g = res.g
    out["lip_f"] = f.lipschitz_constant()
    out["var_check"] = all(total_variation(iterate(g, n)) <= res.lip_g**n for n in range(1, args.check_n + 1))
    if not out["var_check"]:
        raise CheckFailed(out)
    return out


# ---------------------------------------------------------------------------
# chain
# ---------------------------------------------------------------------------

def _structure(args):
    ts = structure_from_json(_load(args.inp))
    return ts, parse_state(ts, args.anchor)


def cmd_chain_counts(args):
    ts, a = _structure(args)
    b = parse_state(ts, args.target) if args.target is not None else None
    tab = path_counts(ts, a, args.n, b=b, mode=args.mode)
    rows = tab.to_rows()
    if tab.exact:
        rows = [(n, str(p), str(r), str(c)) for n, p, r, c in rows]
    _write_csv(args.csv, [("n", "loops", "row", "col")] + rows)
    return {"anchor": a, "target": tab.target, "exact": tab.exact,
            "columns": ["n", "loops", "row", "col"], "rows": rows}


def cmd_chain_entropy(args):
    ts, a = _structure(args)
    est = entropy_estimates(ts, a, args.n, estimator=args.estimator, mode=args.mode)
    last = est.last
    out = {"estimator": args.estimator, "n": args.n, "last": last,
           "last_exp": {k: (math.exp(v) if v is not None else None) for k, v in last.items()},
           "zero_counts": est.zero_counts}
    rows = [(n + 1, est.gurevich[n], est.salama[n], est.revsalama[n]) for n in range(args.n)]
    _write_csv(args.csv, [("n", "gurevich", "salama", "revsalama")] + rows)
    return out


def cmd_chain_taboo(args):
    ts, a = _structure(args)
    fe = taboo_counts(ts, a, args.n)
    rep = convolution_identity_check(ts, a, args.n)
    out = {"anchor": a, "first_entrance": [str(c) for c in fe], "identity_ok": rep.ok,
           "checked": rep.checked, "first_failure": rep.first_failure}
    _write_csv(args.csv, [("n", "first_entrance")] + list(enumerate(fe)))
    if not rep.ok:
        raise CheckFailed(out)
    return out


def cmd_chain_subeig(args):
    ts, a = _structure(args)
    lam = as_rational(args.lam)
    v = pruitt_construct(ts, a, lam, args.N)
    states = list(v.entries)
    if args.radius is not None:
        states = [s for s in states if abs(s[0]) <= args.radius]
        window = (-args.radius, args.radius)
    else:
        window = None
    rep = verify_subeigenvector(ts, v, lam, window=window, rtol=v.tail_on(states))
    sm = summability(ts, a, lam, args.N)
    out = {"vector": v.to_json(), "verify": {"ok": rep.ok, "max_ratio": rep.max_ratio,
                                             "deficiencies": rep.deficiencies,
                                             "boundary_rows": len(rep.boundary_rows),
                                             "rtol": v.tail_on(states)},
           "summability": {"value": sm.value, "extrapolated": sm.extrapolated,
                           "divergent": sm.divergent}}
    if not rep.ok:
        raise CheckFailed(out)
    return out


def cmd_chain_conjugate(args):
    f = _need_pwl(map_from_json(_load(args.inp)))
    ms = MarkovSystem(f, _rational_list(args.partition))
    v = _rational_list(args.v)
    g = build_conjugate(ms, v)
    ids = identity_checks(ms, v, args.n)
    rt = round_trip(ms, v, g)
    out = {"g": g, "lip": g.lipschitz_constant(), "lambda_ratios": lambda_ratios(ms, v),
           "psi": psi_on_refinement(ms, v, args.n),
           "decay": cylinder_diameter_decay(ms, v, args.n).max_delta,
           "identities_ok": ids.ok, "round_trip_ok": rt.equal and rt.subeigen_ok}
    if not (ids.ok and out["round_trip_ok"]):
        raise CheckFailed(out)
    return out


# ---------------------------------------------------------------------------
# check / example
# ---------------------------------------------------------------------------

def cmd_check_conjugacy(args):
    f, g, psi = (map_from_json(_load(p)) for p in (args.f, args.g, args.psi))
    if args.nodes:
        # table points whose image is again a table point: where a finite psi is exact
        xs = getattr(psi, "xs", None)
        if xs is None:
            raise ValueError("--nodes needs psi given as a table")
        grid = [float(x) for x in xs if f(x) in psi]
    else:
        grid = [(k + 0.5) / args.grid for k in range(args.grid)]
    res = check_conjugacy(f, g, psi, grid)
    out = {"residual": res, "points": len(grid), "tol": args.tol, "ok": res < args.tol}
    if not out["ok"]:
        raise CheckFailed(out)
    return out


def cmd_example_gap(args):
    rep = run_gap_pipeline(args.n_counts, args.n_entropy)
    ex = build_example()
    bridge = vertex_edge_count_bridge(ex["gamma"], ex["gamma_prime"], min(args.n_counts, 20))
    out = rep.to_json()
    out["checks"]["vertex_edge_bridge"] = bridge.ok
    out["ok"] = out["ok"] and bridge.ok
    _write_csv(args.csv, rep.csv_rows())
    if not out["ok"]:
        raise CheckFailed(out)
    return out


def cmd_example_tent(args):
    f = tent_map()
    rows = {}
    for x in ("1/3", "1/2", "2/3"):
        c = preimage_count(f, Fraction(x), args.n)
        rows[x] = {"count": c, "growth": math.log(c) / args.n}
    ok = all(abs(r["growth"] / math.log(2) - 1) <= 0.05 for r in rows.values())
    out = {"n": args.n, "preimages": rows, "log2": math.log(2), "ok": ok}
    if not ok:
        raise CheckFailed(out)
    return out


def cmd_example_power(args):
    f, g = AnalyticMap("power", args.s), AnalyticMap("power", args.s ** 2)
    psi = AnalyticMap("psi_t", args.s ** 2)
    grid = [(k + 0.5) / args.grid for k in range(args.grid)]
    res = check_conjugacy(f, g, psi, grid)
    out = {"f": f, "g": g, "psi": psi, "residual": res, "ok": res < args.tol}
    if not out["ok"]:
        raise CheckFailed(out)
    return out


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lipconj", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    top = ap.add_subparsers(dest="group", required=True)

    m = top.add_parser("map").add_subparsers(dest="cmd", required=True)
    p = m.add_parser("var", help="exact Var f^n")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_map_var)
    p = m.add_parser("lip", help="exact Lipschitz constant")
    p.add_argument("--in", dest="inp", required=True)
    p.set_defaults(func=cmd_map_lip)
    p = m.add_parser("preimages", help="#f^-n(x) for n = 1..N")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--window", help="lo,hi certificate window for a lift")
    p.add_argument("--enumerate", action="store_true", help="list preimages instead of counting")
    p.add_argument("--csv")
    p.set_defaults(func=cmd_map_preimages)
    p = m.add_parser("conjugate-variation", help="conjugate with Lipschitz constant near nu")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--nu", required=True)
    p.add_argument("--epsilon", default="1/10")
    p.add_argument("--N", type=int, default=30)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--check-n", type=int, default=6)
    p.set_defaults(func=cmd_map_conjugate_variation)

    c = top.add_parser("chain").add_subparsers(dest="cmd", required=True)
    for name, func in (("counts", cmd_chain_counts), ("entropy", cmd_chain_entropy),
                       ("taboo", cmd_chain_taboo), ("subeig", cmd_chain_subeig)):
        p = c.add_parser(name)
        p.add_argument("--in", dest="inp", required=True)
        p.add_argument("--anchor", default="0")
        p.set_defaults(func=func)
        if name == "counts":
            p.add_argument("--target")
        if name in ("counts", "entropy"):
            p.add_argument("--mode", choices=("exact", "scaled", "auto"), default="auto" if name == "entropy" else "exact")
        if name == "entropy":
            p.add_argument("--estimator", choices=("ratio", "root"), default="ratio")
        if name == "subeig":
            p.add_argument("--lambda", dest="lam", required=True)
            p.add_argument("--N", type=int, default=60)
            p.add_argument("--radius", type=int, help="check rows with |cell| <= radius")
        else:
            p.add_argument("--n", type=int, default=20)
            p.add_argument("--csv")
    p = c.add_parser("conjugate", help="conjugate map from a subeigenvector")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--partition", required=True, help="comma-separated partition points")
    p.add_argument("--v", required=True, help="comma-separated positive vector")
    p.add_argument("--n", type=int, default=4)
    p.set_defaults(func=cmd_chain_conjugate)

    k = top.add_parser("check").add_subparsers(dest="cmd", required=True)
    p = k.add_parser("conjugacy", help="sup |psi(f(x)) - g(psi(x))| on a grid")
    for name in ("--f", "--g", "--psi"):
        p.add_argument(name, required=True)
    p.add_argument("--grid", type=int, default=1000)
    p.add_argument("--nodes", action="store_true", help="evaluate on psi table points instead of a grid")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_check_conjugacy)

    e = top.add_parser("example").add_subparsers(dest="cmd", required=True)
    p = e.add_parser("gap")
    p.add_argument("--n-counts", type=int, default=40)
    p.add_argument("--n-entropy", type=int, default=400)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_example_gap)
    p = e.add_parser("tent")
    p.add_argument("--n", type=int, default=20)
    p.set_defaults(func=cmd_example_tent)
    p = e.add_parser("power")
    p.add_argument("--s", type=float, default=2.0)
    p.add_argument("--grid", type=int, default=1000)
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_example_power)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    status = 0
    try:
        out = args.func(args)
    except CheckFailed as exc:
        out, status = exc.payload, 1
    except DivergenceError as exc:
        out, status = {"error": str(exc), "divergent": True}, 1
    except ResourceLimitError as exc:
        out, status = {"error": str(exc)}, 3
    except (ValueError, KeyError, TypeError, OSError, ZeroDivisionError) as exc:
        out, status = {"error": str(exc)}, 2
    json.dump(jsonable(out), sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
