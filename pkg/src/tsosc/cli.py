"""Command-line front end.

    python3 -m tsosc poly --scale uniform:h=1,t0=0 --k 2 --s 2 --t 5
    python3 -m tsosc reproduce --example q-difference --q 2 --n 2 --b0 1 --beta0 1

Exit status is 0 whenever a verdict was computed (including "Inconclusive"),
1 when a computation fails, and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import classify, monomials, oscillation, simulate
from . import expr as ex
from .calculus import GridFn
from .config import parse_config
from .errors import TimeScaleError, ValidationError
from .scale import Explicit, Geometric, GridWindow, Uniform

# which module operation each command runs, for error messages
OPERATIONS = {
    "poly": "monomials.h_poly",
    "lemmas": "monomials.check_lemma_inequalities",
    "classify": "classify.kiguradze_profile",
    "philos": "classify.verify_philos",
    "criterion": "oscillation.criterion",
    "simulate": "simulate.step_ivp",
    "reproduce": "simulate.reproduce_example",
}


def parse_scale(text: str):
    """``uniform:h=1,t0=0``, ``geometric:q=2,t0=1`` or ``explicit:points=0;1;4;9``."""
    kind, _, rest = text.partition(":")
    opts = {}
    for item in filter(None, rest.split(",")):
        key, eq, val = item.partition("=")
        if not eq:
            raise ValidationError(f"scale option {item!r} is not key=value")
        opts[key.strip()] = val.strip()
    try:
        if kind == "uniform":
            ts = Uniform(float(opts.pop("h", 1)), float(opts.pop("t0", 0)))
        elif kind == "geometric":
            ts = Geometric(float(opts.pop("q")), float(opts.pop("t0", 1)))
        elif kind == "explicit":
            ts = Explicit(tuple(float(v) for v in opts.pop("points").split(";")))
        else:
            raise ValidationError(f"unknown scale type {kind!r}")
    except KeyError as e:
        raise ValidationError(f"scale {kind!r} needs option {e.args[0]!r}") from None
    except ValueError as e:
        if isinstance(e, ValidationError):
            raise
        raise ValidationError(f"bad scale option: {e}") from None
    if opts:
        raise ValidationError(f"unknown scale options: {sorted(opts)}")
    return ts


def _number(text):
    """Accept plain numbers and fractions such as ``1/3``."""
    if "/" in text:
        a, b = text.split("/", 1)
        return float(a) / float(b)
    return float(text)


# -- csv/json ------------------------------------------------------------------

def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def load_trace(path) -> dict:
    """Read a CSV written by this tool back into float columns."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValidationError(f"{path} is empty")
    header, body = rows[0], rows[1:]
    cols = list(zip(*body)) if body else [()] * len(header)
    return {name: np.array([float(v) for v in col]) for name, col in zip(header, cols)}


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    return str(o)


def _strict(o):
    """NaN and infinities become null so the output is valid JSON."""
    if isinstance(o, float) and not np.isfinite(o):
        return None
    if isinstance(o, dict):
        return {k: _strict(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_strict(v) for v in o]
    return o


def _emit(doc, out=None):
    text = json.dumps(_strict(json.loads(json.dumps(doc, default=_json_default))), indent=2, allow_nan=False)
    if out:
        Path(out).write_text(text + "\n")
    print(text)


# -- commands ------------------------------------------------------------------

def cmd_poly(a):
    ts = parse_scale(a.scale)
    fn = monomials.g_poly if a.g else monomials.h_poly
    t, s = (_number(a.t), _number(a.s))
    if a.exact:
        from fractions import Fraction
        t, s = Fraction(a.t), Fraction(a.s)
    val = fn(ts, a.k, t, s, exact=a.exact)
    print(val if a.exact else f"{float(val):.15g}")


def cmd_lemmas(a):
    ts = parse_scale(a.scale)
    s = _number(a.s)
    i_s = ts.index_of(s)
    rep = monomials.check_lemma_inequalities(ts, a.kmax, a.lmax, s, (i_s, i_s + a.points - 1), a.tol)
    _emit({name: r.as_dict() for name, r in rep.items()}, a.json)


def _sampled_function(a):
    ts = parse_scale(a.scale)
    if a.csv:
        cols = load_trace(a.csv)
        if "t" not in cols or "f" not in cols:
            raise ValidationError("input CSV needs columns t and f")
        i0 = ts.index_of(cols["t"][0])
        f = GridFn(GridWindow(ts, i0, i0 + len(cols["t"]) - 1), cols["f"])
        if not np.allclose(f.t, cols["t"], rtol=1e-9):
            raise ValidationError("CSV t column is not a contiguous run of scale points")
        return f
    i0 = 0 if a.start is None else ts.index_of(_number(a.start))
    if a.expr:
        node = ex.parse(a.expr)
        return GridFn.from_function(ts, i0, i0 + a.points - 1, lambda t: ex.evaluate(node, t))
    rng = np.random.default_rng(a.seed)
    m = a.m if a.m is not None else int(rng.choice([m for m in range(a.n) if (a.n - m) % 2 == 1]))
    return classify.construct_kiguradze_function(ts, i0, a.points, a.n, m, rng)


def cmd_classify(a):
    f = _sampled_function(a)
    prof = classify.kiguradze_profile(f, a.n, a.strict_tol)
    doc = prof.as_dict()
    doc["s"] = float(f.t[prof.s_index])
    _emit(doc, a.json)


def cmd_philos(a):
    f = _sampled_function(a)
    prof = classify.kiguradze_profile(f, a.n, a.strict_tol)
    doc = {"profile": prof.as_dict()}
    if a.lam is not None:
        t0 = f.t[0] if a.t0 is None else _number(a.t0)
        r, worst = classify.verify_philos_lambda(f, a.n, a.lam, t0, prof)
        doc["lambda"] = {"lambda": a.lam, "r_index": r, "r": float(f.t[r]), "worst_normalized_slack": worst}
    else:
        res = classify.verify_philos(f, a.n, prof)
        doc["philos"] = {"min_slack": res.min_slack, "min_normalized_slack": res.min_normalized,
                         "where": float(f.t[res.where]), "checked": res.checked, "passed": res.passed}
    _emit(doc, a.json)


def _load_config(path):
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ValidationError(f"cannot read config: {e}") from None
    return parse_config(text)


def cmd_criterion(a):
    spec, run = _load_config(a.config)
    pts = a.points or run.window_points
    reports = []
    windows = expo = None
    if a.kind in ("windows", "both"):
        windows = oscillation.criterion_windows(spec, run.gamma, pts, margin=run.margin)
        reports += list(windows)
    if a.kind in ("exponential", "both"):
        expo = oscillation.criterion_exponential(spec, run.lambda_grid(), pts, margin=run.margin)
        reports.append(expo)
    bundle = oscillation.CriterionBundle(expo, windows)
    div = oscillation.divergence_check(spec, pts)
    doc = {"spec": spec.to_dict(), "criteria": bundle.as_dict(), "divergence": div.as_dict(),
           "conclusion": oscillation.conclude(spec, bundle, div).as_dict()}
    if a.out:
        for r in reports:
            write_csv(f"{a.out}-{r.criterion}-{r.kind}.csv", ["t", "value", "window_lo", "window_hi"], r.rows())
    _emit(doc, f"{a.out}.json" if a.out else None)


def cmd_simulate(a):
    spec, run = _load_config(a.config)
    init = simulate.InitialData.from_expression(spec, run.phi)
    trace = simulate.step_ivp(spec, init, a.horizon or run.horizon)
    if a.out:
        write_csv(f"{a.out}.csv", ["index", "t", "x", "z"], trace.rows())
    _emit({"spec": spec.to_dict(), "simulation": trace.as_dict()}, f"{a.out}.json" if a.out else None)


EXAMPLE_FLAGS = ("q", "n", "b0", "beta0", "a0", "alpha0", "p", "h")


def cmd_reproduce(a):
    params = {k: getattr(a, k) for k in EXAMPLE_FLAGS if getattr(a, k) is not None}
    rep = simulate.reproduce_example(a.example, params, a.horizon, a.gamma,
                                     simulate_continuous=a.simulate_continuous)
    trace = rep.pop("_trace", None)
    bundle = rep.pop("_bundle", None)
    if a.out and trace is not None:
        write_csv(f"{a.out}-simulation.csv", ["index", "t", "x", "z"], trace.rows())
        for r in bundle.reports:
            write_csv(f"{a.out}-{r.criterion}-{r.kind}.csv", ["t", "value", "window_lo", "window_hi"], r.rows())
    if "conclusion" in rep:
        rep["verdict"] = rep["conclusion"]["verdict"]
    _emit(rep, f"{a.out}.json" if a.out else None)


def _function_source(p):
    p.add_argument("--scale", required=True, help="e.g. uniform:h=1,t0=0")
    p.add_argument("--n", type=int, required=True)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--csv", help="CSV with columns t,f")
    src.add_argument("--expr", help="closed-form f(t), sampled on --points points from --start")
    p.add_argument("--start", help="first point for --expr or the constructor (default: the scale anchor)")
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--m", type=int, help="key number for the random constructor")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--strict-tol", type=float, default=1e-12)
    p.add_argument("--json", help="also write the report here")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tsosc", description="Time-scale monomials, Kiguradze/Philos checks, "
                                 "oscillation criteria and simulation of neutral delay dynamic equations.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("poly", help="evaluate h_k(t, s) (or g_k with --g)")
    p.add_argument("--scale", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", required=True)
    p.add_argument("--t", required=True)
    p.add_argument("--g", action="store_true")
    p.add_argument("--exact", action="store_true", help="rational arithmetic")
    p.set_defaults(func=cmd_poly)

    p = sub.add_parser("lemmas", help="worst slack of the monomial inequalities")
    p.add_argument("--scale", required=True)
    p.add_argument("--kmax", type=int, default=4)
    p.add_argument("--lmax", type=int, default=4)
    p.add_argument("--s", default="0")
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--json")
    p.set_defaults(func=cmd_lemmas)

    p = sub.add_parser("classify", help="Kiguradze key number of a sampled function")
    _function_source(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("philos", help="check the Philos inequality (or its lambda version with --lam)")
    _function_source(p)
    p.add_argument("--lam", type=float)
    p.add_argument("--t0", help="base point of the lambda version (default: first point)")
    p.set_defaults(func=cmd_philos)

    p = sub.add_parser("criterion", help="evaluate the oscillation criteria of a config")
    p.add_argument("--config", required=True)
    p.add_argument("--kind", choices=("windows", "exponential", "both"), default="both")
    p.add_argument("--points", type=int)
    p.add_argument("--out", help="output prefix for CSV traces and the JSON report")
    p.set_defaults(func=cmd_criterion)

    p = sub.add_parser("simulate", help="step the equation of a config")
    p.add_argument("--config", required=True)
    p.add_argument("--horizon", type=int)
    p.add_argument("--out", help="output prefix for the CSV trace and JSON report")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reproduce", help="run a worked example end to end")
    p.add_argument("--example", required=True, choices=oscillation.EXAMPLES)
    for flag in EXAMPLE_FLAGS:
        p.add_argument(f"--{flag}", type=int if flag == "n" else float)
    p.add_argument("--horizon", type=int)
    p.add_argument("--gamma", type=float, default=0.25)
    p.add_argument("--simulate-continuous", action="store_true",
                   help="also run the criteria and a fine-grid simulation for the continuous example")
    p.add_argument("--out")
    p.set_defaults(func=cmd_reproduce)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        args.func(args)
    except (TimeScaleError, ValueError) as e:
        print(f"tsosc: {OPERATIONS[args.command]}: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
