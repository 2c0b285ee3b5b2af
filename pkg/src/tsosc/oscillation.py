"""Oscillation criteria for neutral delay dynamic equations

    [x(t) + A(t) x(alpha(t))]^{Δ^n} + B(t) x(beta(t)) = 0

on discrete time scales, and the dispatcher that turns criterion results into
oscillation verdicts.  Asymptotic quantities (liminf, limsup, divergent
integrals) are estimated on finite windows; every estimate carries a stability
check and an ``inconclusive-window`` escape.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import expr as ex
from .errors import AllLambdaNonRegressive, BadGamma, UnknownExample, ValidationError
from .monomials import first_arg_table, q_gamma, second_arg_table
from .scale import Geometric, TimeScale, Uniform

RANGE_TAGS = ("R1", "R2", "none")
DEFAULT_GAMMA = 0.25
DEFAULT_MARGIN = 1e-3
TAIL_FRACTION = 0.25
STABILITY_RTOL = 0.01
LAMBDA_GRID = np.logspace(-4, 2, 200)

SATISFIED = "satisfied"
NOT_SATISFIED = "not-satisfied"
INCONCLUSIVE = "inconclusive-window"


def _points_at(ts: TimeScale, idx: np.ndarray) -> np.ndarray:
    idx = np.asarray(idx, dtype=np.int64)
    if len(idx) == 0:
        return np.array([])
    lo = int(idx.min())
    return ts.points(lo, int(idx.max()))[idx - lo]


@dataclass(frozen=True, eq=False)
class NeutralEquationSpec:
    """Order, scale, anchor, coefficient and delay expressions, and the neutral range tag."""

    n: int
    scale: TimeScale
    t0: float
    A: ex.Expr
    B: ex.Expr
    alpha: ex.Expr
    beta: ex.Expr
    range_tag: str = "none"
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for name in ("A", "B", "alpha", "beta"):
            val = getattr(self, name)
            if isinstance(val, str):
                object.__setattr__(self, name, ex.parse(val))
        object.__setattr__(self, "params", dict(self.params))
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ValidationError(f"order n must be a positive integer, got {self.n!r}")
        if self.range_tag not in RANGE_TAGS:
            raise ValidationError(f"range_tag must be one of {RANGE_TAGS}, got {self.range_tag!r}")
        missing = set().union(*(ex.params_of(getattr(self, k)) for k in ("A", "B", "alpha", "beta"))) - set(self.params)
        if missing:
            raise ValidationError(f"unbound parameters: {sorted(missing)}")
        try:
            self.scale.index_of(self.t0)
        except Exception as e:
            raise ValidationError(f"t0={self.t0} is not a point of the scale") from e

    @property
    def t0_index(self) -> int:
        return self.scale.index_of(self.t0)

    def indices(self, points: int) -> np.ndarray:
        i0 = self.t0_index
        return np.arange(i0, i0 + points, dtype=np.int64)

    def coef(self, which: str, idx) -> np.ndarray:
        """``A`` or ``B`` (or a raw delay value) at the scale points with the given indices."""
        return np.asarray(ex.evaluate(getattr(self, which), _points_at(self.scale, idx), self.params), dtype=float)

    def delay_indices(self, which: str, idx) -> Tuple[np.ndarray, bool]:
        """Snapped-down grid indices of ``alpha`` or ``beta``; the flag reports any snapping."""
        vals = self.coef(which, idx)
        snapped = self.scale.snap_down_indices(vals)
        exact = np.isclose(_points_at(self.scale, snapped), vals, rtol=1e-9, atol=0)
        return snapped, not bool(np.all(exact))

    def a_is_zero(self, points: int = 200) -> bool:
        if isinstance(self.A, ex.Num):
            return self.A.value == 0
        return bool(np.all(self.coef("A", self.indices(points)) == 0))

    def check(self, points: int = 200) -> None:
        """Validate the equation invariants on the first ``points`` grid points from ``t0``."""
        idx = self.indices(points)
        t = _points_at(self.scale, idx)
        vals = {k: self.coef(k, idx) for k in ("A", "B", "alpha", "beta")}
        for k, v in vals.items():
            if not np.all(np.isfinite(v)):
                j = int(np.flatnonzero(~np.isfinite(v))[0])
                raise ValidationError(f"{k} is not finite at t={t[j]}")
        if np.any(vals["B"] < 0):
            j = int(np.flatnonzero(vals["B"] < 0)[0])
            raise ValidationError(f"B must be nonnegative: B({t[j]}) = {vals['B'][j]}")
        slack = 1e-12 * np.maximum(1.0, np.abs(t))
        for k in ("alpha", "beta"):
            v = vals[k]
            if np.any(v > t + slack):
                j = int(np.flatnonzero(v > t + slack)[0])
                raise ValidationError(f"{k}(t) <= t violated at t={t[j]}: {k} = {v[j]}")
            if np.any(np.diff(v) < -slack[1:]):
                raise ValidationError(f"{k} must be nondecreasing")
            if not v[-1] > v[0]:
                raise ValidationError(f"{k} must be unbounded (it does not grow over the window)")
        a = vals["A"]
        tail = a[int(len(a) * (1 - TAIL_FRACTION)):]
        if self.range_tag == "R1":
            if np.any(a < 0) or np.any(a > 1):
                raise ValidationError("range R1 needs 0 <= A <= 1")
            if not tail.max() < 1:
                raise ValidationError("range R1 needs limsup A < 1")
        elif self.range_tag == "R2":
            if np.any(a < -1) or np.any(a > 0):
                raise ValidationError("range R2 needs -1 <= A <= 0")
            if not tail.min() > -1:
                raise ValidationError("range R2 needs liminf A > -1")
        elif np.any(a != 0):
            raise ValidationError("range 'none' is the nonneutral equation and needs A = 0")

    def __eq__(self, other):
        if not isinstance(other, NeutralEquationSpec):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    __hash__ = None

    def to_dict(self) -> dict:
        return {
            "n": int(self.n), "scale": self.scale.to_dict(), "t0": self.t0,
            "A": ex.render(self.A), "B": ex.render(self.B),
            "alpha": ex.render(self.alpha), "beta": ex.render(self.beta),
            "range": self.range_tag, "params": dict(self.params),
        }


def infer_range(A, scale, t0, params, points=200) -> str:
    """``none`` for a vanishing neutral coefficient, else the first of R1/R2 that fits."""
    i0 = scale.index_of(t0)
    a = np.asarray(ex.evaluate(A, scale.points(i0, i0 + points - 1), params), dtype=float)
    tail = a[int(points * (1 - TAIL_FRACTION)):]
    if np.all(a == 0):
        return "none"
    if np.all((0 <= a) & (a <= 1)) and tail.max() < 1:
        return "R1"
    if np.all((-1 <= a) & (a <= 0)) and tail.min() > -1:
        return "R2"
    raise ValidationError("A fits neither range R1 (0 <= A <= 1) nor R2 (-1 <= A <= 0)")


# -- criterion reports ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CriterionReport:
    """Per-t trace of one criterion quantity with its tail estimate and verdict."""

    criterion: str
    kind: str  # liminf / limsup
    t: np.ndarray
    trace: np.ndarray
    window_lo: np.ndarray
    window_hi: np.ndarray
    tail_estimate: float
    threshold: float
    prefix_estimates: Tuple[float, ...]
    stable: bool
    verdict: str
    margin: float = DEFAULT_MARGIN
    excluded: Tuple[float, ...] = ()
    neutral: bool = False
    notes: Tuple[str, ...] = ()

    @property
    def satisfied(self) -> bool:
        return self.verdict == SATISFIED

    def rows(self):
        for row in zip(self.t, self.trace, self.window_lo, self.window_hi):
            yield tuple(float(v) for v in row)

    def as_dict(self) -> dict:
        return {
            "criterion": self.criterion, "kind": self.kind, "verdict": self.verdict,
            "tail_estimate": self.tail_estimate, "threshold": self.threshold,
            "margin": self.margin, "prefix_estimates": list(self.prefix_estimates),
            "stable": self.stable, "neutral": self.neutral, "points": len(self.t),
            "excluded": list(self.excluded), "notes": list(self.notes),
        }


def _estimate(trace: np.ndarray, kind: str) -> float:
    k = max(1, math.ceil(TAIL_FRACTION * len(trace)))
    tail = trace[-k:]
    tail = tail[np.isfinite(tail)]
    if len(tail) == 0:
        return float("nan")
    return float(tail.min() if kind == "liminf" else tail.max())


def _judge(trace, kind, threshold, margin):
    """Tail estimate on the 50/75/100% prefixes, stability flag and verdict."""
    n = len(trace)
    if n < 8:
        return float("nan"), (), False, INCONCLUSIVE
    prefixes = tuple(_estimate(trace[: max(1, int(round(f * n)))], kind) for f in (0.5, 0.75, 1.0))
    est = prefixes[-1]
    if not all(np.isfinite(prefixes)):
        return est, prefixes, False, INCONCLUSIVE
    scale = max(abs(est), 1e-300)
    stable = all(abs(b - a) < STABILITY_RTOL * scale for a, b in zip(prefixes, prefixes[1:]))
    beyond = est > threshold + margin * abs(threshold)
    if not stable:
        return est, prefixes, False, INCONCLUSIVE
    return est, prefixes, True, SATISFIED if beyond else NOT_SATISFIED


def _use_neutral(spec, neutral):
    return spec.range_tag == "R1" if neutral is None else bool(neutral)


def _evaluation(spec: NeutralEquationSpec, points: int, neutral: bool, need_sigma: bool):
    """Indices of the evaluation points, their beta indices, and ``mu * c`` on the needed range.

    ``c(eta) = [1 - A(beta(eta))] B(eta) h_{n-1}(beta(eta), t0)`` with the
    bracket only in the neutral variant.
    """
    ts = spec.scale
    i0 = spec.t0_index
    idx = spec.indices(points)
    if need_sigma and ts.max_index is not None:
        idx = idx[idx < ts.max_index]
    b_idx, snapped = spec.delay_indices("beta", idx)
    # the whole window [beta(t), t) must have beta(eta) >= t0, where h_{n-1}(beta(eta), t0) >= 0
    keep = b_idx >= i0
    if np.any(keep):
        keep[keep] = spec.delay_indices("beta", b_idx[keep])[0] >= i0
    idx, b_idx = idx[keep], b_idx[keep]
    if len(idx) == 0:
        return idx, b_idx, None, 0, snapped
    lo = int(b_idx[0])
    hi = int(idx[-1])
    eta = np.arange(lo, hi + 1, dtype=np.int64)
    be, snap2 = spec.delay_indices("beta", eta)
    blo = min(int(be.min()), i0)
    h = first_arg_table(ts, spec.n - 1, i0, blo, int(be.max()))[spec.n - 1][be - blo]
    c = spec.coef("B", eta) * h
    if neutral:
        c = c * (1 - spec.coef("A", be))
    mu = ts.mu(lo, hi)
    return idx, b_idx, mu * c, lo, snapped or snap2


def criterion_windows(spec: NeutralEquationSpec, gamma: float = DEFAULT_GAMMA, points: int = 200,
                      neutral: Optional[bool] = None, margin: float = DEFAULT_MARGIN):
    """Window integrals over ``[beta(t), t)`` and ``[beta(t), sigma(t))``.

    Returns ``(liminf_report, limsup_report)``; the liminf estimate is compared
    with ``gamma`` and the limsup estimate with ``1 - (1 - sqrt(1 - gamma))^2``.
    ``neutral`` defaults to the bracketed variant for range R1.
    """
    if not 0 < gamma < 1:
        raise BadGamma(f"gamma must lie in (0, 1), got {gamma}")
    neutral = _use_neutral(spec, neutral)
    idx, b_idx, w, lo, snapped = _evaluation(spec, points, neutral, need_sigma=True)
    ts = spec.scale
    notes = ("delays were snapped down onto the grid",) if snapped else ()
    thresholds = {"liminf": gamma, "limsup": 1 - (1 - math.sqrt(1 - gamma)) ** 2}
    if w is None:
        empty = np.array([])
        return tuple(
            CriterionReport("windows", k, empty, empty, empty, empty, float("nan"), thr, (), False,
                            INCONCLUSIVE, margin, neutral=neutral, notes=notes + ("no evaluation point has beta(beta(t)) >= t0",))
            for k, thr in thresholds.items())
    prefix = np.concatenate([[0.0], np.cumsum(w)])
    t = _points_at(ts, idx)
    wlo = _points_at(ts, b_idx)
    reports = []
    for kind, end in (("liminf", idx), ("limsup", idx + 1)):
        trace = prefix[end - lo] - prefix[b_idx - lo]
        est, pre, stable, verdict = _judge(trace, kind, thresholds[kind], margin)
        reports.append(CriterionReport(
            "windows", kind, t, trace, wlo, _points_at(ts, end), est, thresholds[kind], pre, stable,
            verdict, margin, neutral=neutral, notes=notes))
    return tuple(reports)


def _log_objective(loglam, W):
    """``log(1 / (lam * prod(1 - lam w)))`` for rows of ``W``; +inf where not regressive."""
    lam = np.exp(loglam)
    fac = 1 - lam[..., None] * W
    with np.errstate(divide="ignore", invalid="ignore"):
        val = -loglam - np.sum(np.log(np.where(fac > 0, fac, np.nan)), axis=-1)
    return np.where(np.all(fac > 0, axis=-1), val, np.inf)


def _golden(f, a, b, iters=60):
    """Vectorised golden-section search for minima of convex ``f`` on ``[a, b]``."""
    g = (math.sqrt(5) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        left = fc < fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        c_new = np.where(left, b - g * (b - a), d)
        d_new = np.where(left, c, a + g * (b - a))
        fc_new = np.where(left, f(c_new), fd)
        fd_new = np.where(left, fc, f(d_new))
        c, d, fc, fd = c_new, d_new, fc_new, fd_new
    x = (a + b) / 2
    return x, f(x)


def criterion_exponential(spec: NeutralEquationSpec, lambda_grid: Sequence[float] = LAMBDA_GRID,
                          points: int = 200, neutral: Optional[bool] = None,
                          margin: float = DEFAULT_MARGIN, refine: bool = True) -> CriterionReport:
    """``inf_lambda 1 / (lambda e_{-lambda c}(t, beta(t)))`` per t, compared with 1.

    The infimum is taken over the regressive members of ``lambda_grid`` and
    refined by golden-section search in ``log(lambda)`` around the best grid
    point (the objective is convex there).  Points where no grid value is
    regressive are recorded in ``excluded`` and left out of the tail; if that
    happens everywhere :class:`AllLambdaNonRegressive` is raised.
    """
    grid = np.sort(np.asarray(lambda_grid, dtype=float))
    if grid.size == 0:
        raise ValidationError("lambda grid is empty")
    if np.any(grid <= 0):
        raise ValidationError("lambda grid must be positive")
    neutral = _use_neutral(spec, neutral)
    idx, b_idx, w, lo, snapped = _evaluation(spec, points, neutral, need_sigma=False)
    ts = spec.scale
    notes = ("delays were snapped down onto the grid",) if snapped else ()
    if w is None:
        empty = np.array([])
        return CriterionReport("exponential", "liminf", empty, empty, empty, empty, float("nan"), 1.0, (),
                               False, INCONCLUSIVE, margin, neutral=neutral, notes=notes)
    lens = idx - b_idx
    L = max(int(lens.max()), 1)
    out = np.full(len(idx), np.nan)
    loggrid = np.log(grid)
    chunk = max(1, int(2e6 // (L * len(grid))))
    for s in range(0, len(idx), chunk):
        sl = slice(s, s + chunk)
        W = np.zeros((len(idx[sl]), L))
        for r, (a, b) in enumerate(zip(b_idx[sl] - lo, idx[sl] - lo)):
            W[r, : b - a] = w[a:b]
        vals = _log_objective(np.broadcast_to(loggrid, (len(W), len(grid))), W[:, None, :])
        best = np.argmin(vals, axis=1)
        fbest = vals[np.arange(len(W)), best]
        ok = np.isfinite(fbest)
        if refine and np.any(ok):
            a = loggrid[np.maximum(best - 1, 0)]
            b = loggrid[np.minimum(best + 1, len(grid) - 1)]
            # keep the bracket inside the regressive region
            wmax = W.max(axis=1)
            cap = np.where(wmax > 0, -np.log(np.where(wmax > 0, wmax, 1.0)) - 1e-12, np.inf)
            b = np.minimum(b, cap)
            a = np.minimum(a, b)
            x, fx = _golden(lambda u: _log_objective(u, W), a, b)
            fbest = np.where(ok & (fx < fbest), fx, fbest)
        out[sl] = np.where(ok, np.exp(fbest), np.nan)
    excluded = tuple(float(v) for v in _points_at(ts, idx[~np.isfinite(out)]))
    if len(excluded) == len(out):
        raise AllLambdaNonRegressive("no grid value of lambda is regressive at any evaluation point")
    est, pre, stable, verdict = _judge(out, "liminf", 1.0, margin)
    t = _points_at(ts, idx)
    return CriterionReport("exponential", "liminf", t, out, _points_at(ts, b_idx), t, est, 1.0, pre, stable,
                           verdict, margin, excluded=excluded, neutral=neutral, notes=notes)


# -- divergence ----------------------------------------------------------------

@dataclass(frozen=True)
class DivergenceResult:
    verdict: str
    checkpoints: Tuple[float, ...]
    partial_sums: Tuple[float, ...]
    notes: Tuple[str, ...] = ()

    @property
    def diverges(self) -> bool:
        return self.verdict == "diverges-likely"

    def as_dict(self):
        return {"verdict": self.verdict, "checkpoints": list(self.checkpoints),
                "partial_sums": list(self.partial_sums), "notes": list(self.notes)}


def divergence_check(spec: NeutralEquationSpec, points: int = 200, growth: float = 1.5) -> DivergenceResult:
    """Partial sums of ``B(eta) h_{n-1}(t0, sigma(eta)) mu(eta)`` at N/4, N/2 and N points.

    ``diverges-likely`` iff the magnitude grows by at least ``growth`` across
    both doublings; otherwise ``inconclusive``.
    """
    ts = spec.scale
    i0 = spec.t0_index
    hi = i0 + points - 1
    if ts.max_index is not None:
        hi = min(hi, ts.max_index - 1)
    eta = np.arange(i0, hi + 1, dtype=np.int64)
    h = second_arg_table(ts, spec.n - 1, i0, i0 + 1, hi + 1)[spec.n - 1]
    terms = spec.coef("B", eta) * h * ts.mu(i0, hi)
    S = np.abs(np.cumsum(terms))
    N = len(S)
    marks = [max(1, N // 4), max(1, N // 2), N]
    sums = tuple(float(S[m - 1]) for m in marks)
    grows = sums[0] > 0 and sums[1] >= growth * sums[0] and sums[2] >= growth * sums[1]
    notes = []
    if spec.n % 2 == 0:
        notes.append("h_{n-1}(t0, sigma(eta)) is negative for even n; the magnitude of the signed sums is used")
    return DivergenceResult("diverges-likely" if grows else "inconclusive",
                            tuple(float(ts.point(i0 + m - 1)) for m in marks), sums, tuple(notes))


# -- closed-form thresholds of the worked examples -----------------------------

class Threshold(tuple):
    """``(lhs, rhs, satisfied)`` with an optional ``details`` mapping."""

    def __new__(cls, lhs, rhs, satisfied, details=None):
        obj = super().__new__(cls, (float(lhs), float(rhs), bool(satisfied)))
        obj.details = dict(details or {})
        return obj

    lhs = property(lambda self: self[0])
    rhs = property(lambda self: self[1])
    satisfied = property(lambda self: self[2])

    def as_dict(self):
        return {"lhs": self.lhs, "rhs": self.rhs, "satisfied": self.satisfied, **self.details}


EXAMPLES = ("q-difference", "difference", "continuous")

EXAMPLE_DEFAULTS = {
    "q-difference": {"q": 2.0, "n": 2, "b0": 1.0, "beta0": 1},
    "difference": {"n": 2, "a0": 0.5, "alpha0": 1, "beta0": 1, "p": 1.0, "b0": 1.0},
    "continuous": {"n": 4, "b0": 10.0, "alpha0": 2.0, "beta0": 2.0, "h": 0.01},
}


def example_params(example_id: str, params: Optional[Mapping] = None) -> dict:
    if example_id not in EXAMPLE_DEFAULTS:
        raise UnknownExample(f"unknown example {example_id!r}; choose from {EXAMPLES}")
    out = dict(EXAMPLE_DEFAULTS[example_id])
    unknown = set(params or {}) - set(out)
    if unknown:
        raise ValidationError(f"unknown parameters for {example_id}: {sorted(unknown)}")
    out.update(params or {})
    out["n"] = int(out["n"])
    if out["n"] < 1:
        raise ValidationError("n must be positive")
    if out["b0"] < 0:
        raise ValidationError("b0 must be nonnegative")
    return out


def continuous_crossover(n: int) -> float:
    """Smallest ``beta0`` from which the logarithmic test beats the ``1/4`` comparison test."""
    if n < 2:
        raise ValidationError("the comparison needs n >= 2")
    return math.exp(4 / (math.e * (n - 1)))


def threshold_closed_form(example_id: str, params: Optional[Mapping] = None) -> Threshold:
    p = example_params(example_id, params)
    n = p["n"]
    if example_id == "q-difference":
        q, b0, beta0 = p["q"], p["b0"], p["beta0"]
        if not q > 1 or beta0 < 1 or int(beta0) != beta0:
            raise ValidationError("q-difference example needs q > 1 and a positive integer beta0")
        # h_{n-1}(x, 1) / x^{n-1} tends to 1 / q_gamma(q, n)
        lhs = (q - 1) * b0 * beta0 / (q ** (beta0 * (n - 1)) * q_gamma(q, n))
        rhs = (beta0 / (beta0 + 1)) ** (beta0 + 1)
        return Threshold(lhs, rhs, lhs > rhs)
    if example_id == "difference":
        a0, b0, beta0, pw = p["a0"], p["b0"], p["beta0"], p["p"]
        if not 0 < a0 < 1 or beta0 < 1 or int(beta0) != beta0:
            raise ValidationError("difference example needs 0 < a0 < 1 and a positive integer beta0")
        lhs = b0 * (1 - a0)
        rhs = beta0**beta0 / ((beta0 + 1) ** (beta0 + 1) * math.factorial(n - 1))
        if pw < n - 1:
            return Threshold(lhs, rhs, True, {"case": "p < n-1"})
        if pw > n - 1:
            return Threshold(lhs, rhs, False, {"case": "p > n-1: no conclusion"})
        return Threshold(lhs, rhs, lhs > rhs, {"case": "p = n-1"})
    b0, beta0 = p["b0"], p["beta0"]
    if beta0 < 1:
        raise ValidationError("continuous example needs beta0 >= 1")
    lhs = b0 * math.log(beta0) / (beta0 ** (n - 1) * math.factorial(n - 1))
    rhs = 1 / math.e
    details = {"beta0_crossover": continuous_crossover(n)} if n >= 2 else {}
    return Threshold(lhs, rhs, lhs > rhs, details)


def example_spec(example_id: str, params: Optional[Mapping] = None) -> NeutralEquationSpec:
    """Equation spec of a worked example on its natural discrete scale."""
    p = example_params(example_id, params)
    n = p["n"]
    if example_id == "q-difference":
        return NeutralEquationSpec(
            n=n, scale=Geometric(p["q"], 1.0), t0=1.0, A="0", alpha="t",
            B=f"b0/t^{n}", beta="t/q^beta0", range_tag="none",
            params={"b0": p["b0"], "q": p["q"], "beta0": p["beta0"]})
    if example_id == "difference":
        return NeutralEquationSpec(
            n=n, scale=Uniform(1.0, 0.0), t0=1.0, A="a0", alpha="t - alpha0",
            B="b0/t^p", beta="t - beta0", range_tag="R1",
            params={k: p[k] for k in ("a0", "alpha0", "b0", "p", "beta0")})
    return NeutralEquationSpec(
        n=n, scale=Uniform(p["h"], 1.0), t0=1.0, A="-(1 - sin(t))/3", alpha="t/alpha0",
        B=f"b0/t^{n}", beta="t/beta0", range_tag="R2",
        params={k: p[k] for k in ("b0", "alpha0", "beta0")})


# -- verdict dispatch ----------------------------------------------------------

ALL_OSCILLATE = "AllSolutionsOscillate"
OSCILLATE_OR_ZERO = "OscillateOrTendToZero"
UNBOUNDED_OSCILLATE = "UnboundedSolutionsOscillate"
NO_CONCLUSION = "Inconclusive"


@dataclass(frozen=True)
class CriterionBundle:
    """The exponential test, the liminf/limsup window pair, or both."""

    exponential: Optional[CriterionReport] = None
    windows: Optional[Tuple[CriterionReport, CriterionReport]] = None

    @property
    def satisfied(self) -> bool:
        exp_ok = self.exponential is not None and self.exponential.satisfied
        win_ok = self.windows is not None and all(r.satisfied for r in self.windows)
        return exp_ok or win_ok

    @property
    def reports(self):
        out = [] if self.exponential is None else [self.exponential]
        return out + list(self.windows or ())

    @property
    def neutral(self) -> bool:
        return any(r.neutral for r in self.reports)

    def as_dict(self):
        return {"satisfied": self.satisfied, "reports": [r.as_dict() for r in self.reports]}


@dataclass(frozen=True)
class Conclusion:
    verdict: str
    reason: str
    notes: Tuple[str, ...] = ()

    def as_dict(self):
        return {"verdict": self.verdict, "reason": self.reason, "notes": list(self.notes)}


def conclude(spec: NeutralEquationSpec, criteria: CriterionBundle,
             divergence: Optional[DivergenceResult] = None, a_zero: Optional[bool] = None) -> Conclusion:
    """Oscillation verdict from the criterion results and the divergence estimate."""
    if isinstance(criteria, CriterionReport):
        criteria = CriterionBundle(exponential=criteria)
    elif isinstance(criteria, tuple):
        criteria = CriterionBundle(windows=criteria)
    a_zero = spec.a_is_zero() if a_zero is None else a_zero
    even = spec.n % 2 == 0
    div = divergence is not None and divergence.diverges
    notes = []
    if not criteria.satisfied:
        return Conclusion(NO_CONCLUSION, "no oscillation criterion was certified", tuple(notes))
    if even and spec.range_tag != "R2":
        notes.append("even order: the criterion is established for the nonneutral equation and applied to "
                     "the neutral one; with A = 0 both coincide, under R1 the [1 - A] variant is used")
    if a_zero or spec.range_tag == "R1":
        if even:
            return Conclusion(ALL_OSCILLATE, "even order, criterion satisfied", tuple(notes))
        if div:
            return Conclusion(OSCILLATE_OR_ZERO, "odd order, criterion satisfied, integral diverges", tuple(notes))
        return Conclusion(UNBOUNDED_OSCILLATE, "odd order, criterion satisfied, divergence not established",
                          tuple(notes))
    if spec.range_tag == "R2":
        if criteria.neutral:
            notes.append("range R2 needs the criterion without the [1 - A] factor")
            return Conclusion(NO_CONCLUSION, "neutral criterion variant used under R2", tuple(notes))
        if div:
            return Conclusion(OSCILLATE_OR_ZERO, "range R2, criterion satisfied, integral diverges", tuple(notes))
        return Conclusion(NO_CONCLUSION, "range R2 needs the divergent integral", tuple(notes))
    return Conclusion(NO_CONCLUSION, "no applicable oscillation result", tuple(notes))
