"""Explicit stepping of neutral delay dynamic equations on discrete scales.

With ``z = x + A x(alpha)`` the equation reads ``z^{Δ^n}(t) = -B(t) x(beta(t))``.
The n-th delta at ``t_i`` is a linear stencil over ``z(t_i), ..., z(t_{i+n})``
whose weights come from composing first-order deltas with the local
graininess, so it is exact on non-uniform grids too.  Solving the stencil for
its last entry advances ``z`` one point; ``x`` follows from the neutral term.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from . import expr as ex
from .calculus import GridFn
from .errors import HistoryGap, NonDiscreteScale, WindowTooShort
from .oscillation import (
    CriterionBundle,
    NeutralEquationSpec,
    conclude,
    criterion_exponential,
    criterion_windows,
    divergence_check,
    example_params,
    example_spec,
    threshold_closed_form,
    continuous_crossover,
)
from .scale import GridWindow, TimeScale

ZERO_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class InitialData:
    """Initial function on ``[t_{-1}, sigma^{n-1}(t0)]``: history for the delays plus n-1 forward seeds."""

    phi: GridFn
    t_start: float

    @classmethod
    def from_expression(cls, spec: NeutralEquationSpec, phi="1", params=None) -> "InitialData":
        """Sample ``phi`` (an expression string, AST or callable) on exactly the required window."""
        lo, hi = required_history(spec)
        pts = spec.scale.points(lo, hi)
        if callable(phi):
            vals = np.asarray(phi(pts), dtype=float)
        else:
            node = ex.parse(phi) if isinstance(phi, str) else phi
            vals = ex.evaluate(node, pts, {**spec.params, **(params or {})})
        vals = np.broadcast_to(np.asarray(vals, dtype=float), pts.shape).copy()
        return cls(GridFn(GridWindow(spec.scale, lo, hi), vals), spec.t0)


def required_history(spec: NeutralEquationSpec) -> Tuple[int, int]:
    """Index range ``[t_{-1}, sigma^{n-1}(t0)]`` that an initial function must cover."""
    i0 = spec.t0_index
    seeds = np.arange(i0, i0 + spec.n, dtype=np.int64)
    a_idx, _ = spec.delay_indices("alpha", seeds)
    b_idx, _ = spec.delay_indices("beta", seeds[:1])
    return int(min(a_idx.min(), b_idx.min(), i0)), i0 + spec.n - 1


@dataclass(frozen=True, eq=False)
class SolutionTrace:
    """``x`` from ``t_{-1}`` on and ``z`` from ``t0`` on; both end at the last computed point."""

    x: GridFn
    z: GridFn
    sign_changes: Tuple[int, ...]
    trend: str
    snapped: bool = False
    nonfinite_at: Optional[float] = None

    def rows(self):
        ts = self.z.scale
        xs = self.x.values[self.x.window.local(self.z.window.start):]
        for k, (xv, zv) in enumerate(zip(xs, self.z.values)):
            i = self.z.window.start + k
            yield i, ts.point(i), float(xv), float(zv)

    def as_dict(self):
        return {
            "points": len(self.z), "t_end": float(self.z.t[-1]),
            "sign_changes": len(self.sign_changes),
            "last_sign_change": (self.sign_changes[-1] if self.sign_changes else None),
            "trend": self.trend, "delays_snapped": self.snapped,
            "nonfinite_at": self.nonfinite_at,
        }


def stencil_weights(mu: np.ndarray, n: int) -> np.ndarray:
    """Weights ``w[i, r]`` with ``f^{Δ^n}(t_i) = sum_r w[i, r] f(t_{i+r})``.

    ``mu`` holds the graininess at ``t_0 .. t_{M+n-2}``; the result has ``M`` rows.
    """
    M = len(mu) - n + 1
    C = np.ones((len(mu) + 1, 1))
    for k in range(1, n + 1):
        rows = len(C) - 1
        nxt = np.zeros((rows, k + 1))
        nxt[:, 1:] += C[1:]
        nxt[:, :-1] -= C[:-1]
        C = nxt / mu[:rows, None]
    return C[:M]


def step_ivp(spec: NeutralEquationSpec, init: InitialData, horizon: int) -> SolutionTrace:
    """Advance the equation to ``horizon`` grid points counted from ``t0``.

    Requires ``init.phi`` to cover ``t_{-1}`` (the smaller delay of ``t0``)
    through the ``n-1`` successors of ``t0``; those seeds fix the first ``n``
    values of ``z``.  A delay that lands before the initial window raises
    :class:`HistoryGap`.
    """
    ts = spec.scale
    if not ts.is_discrete:
        raise NonDiscreteScale("stepping needs a discrete time scale")
    n = spec.n
    if horizon < n + 1:
        raise ValueError(f"horizon must exceed the order: need at least {n + 1} points")
    i0 = spec.t0_index
    if init.phi.scale != ts:
        raise HistoryGap("initial function lives on a different scale")
    lo, hi_seed = required_history(spec)
    start, seed_end = init.phi.window.start, init.phi.window.end
    if start > lo:
        raise HistoryGap(f"delays reach t={ts.point(lo)} but the initial function starts at {ts.point(start)}")
    if seed_end < hi_seed:
        raise HistoryGap(f"initial function must extend through the {n - 1} successors of t0")
    end = i0 + horizon - 1
    if ts.max_index is not None and end > ts.max_index:
        raise WindowTooShort("horizon runs past the last point of the scale")

    idx = np.arange(i0, end + 1, dtype=np.int64)
    a_idx, snap_a = spec.delay_indices("alpha", idx)
    b_idx, snap_b = spec.delay_indices("beta", idx[: len(idx) - n])
    if len(b_idx) and b_idx.min() < start:
        raise HistoryGap(f"beta reaches t={ts.point(int(b_idx.min()))} before the initial function")
    if a_idx.min() < start:
        raise HistoryGap(f"alpha reaches t={ts.point(int(a_idx.min()))} before the initial function")
    with np.errstate(all="ignore"):
        A = spec.coef("A", idx)
        B = spec.coef("B", idx[: len(idx) - n])
        W = stencil_weights(ts.mu(i0, end - 1), n)

    off = start
    x = np.empty(end - start + 1)
    x[: i0 + n - start] = init.phi.values[: i0 + n - start]
    z = np.empty(len(idx))
    z[:n] = x[i0 - off : i0 + n - off] + A[:n] * x[a_idx[:n] - off]
    stop = None
    with np.errstate(all="ignore"):
        for i in range(len(idx) - n):
            j = i + n  # position being computed
            rhs = -B[i] * x[b_idx[i] - off] - W[i, :n] @ z[i:j]
            z[j] = rhs / W[i, n]
            ja = a_idx[j]
            if ja == idx[j]:
                x[j + i0 - off] = z[j] / (1 + A[j])
            else:
                x[j + i0 - off] = z[j] - A[j] * x[ja - off]
            if not (np.isfinite(z[j]) and np.isfinite(x[j + i0 - off])):
                stop = j
                break
    if stop is not None:
        # floating point ran out (huge t on geometric scales): keep the finite prefix
        if stop < n + 1:
            raise WindowTooShort(f"values stop being finite at t={ts.point(i0 + stop)}")
        end = i0 + stop - 1
        x, z = x[: end - start + 1], z[:stop]
    xs = GridFn(GridWindow(ts, start, end), x)
    zs = GridFn(GridWindow(ts, i0, end), z)
    tail = xs.restrict(i0, end)
    _, changes = _sign_change_positions(tail.values)
    trend = asymptotic_trend(tail) if len(tail) >= 100 else "undetermined"
    nonfinite = None if stop is None else float(ts.point(i0 + stop))
    return SolutionTrace(xs, zs, tuple(int(c) for c in changes), trend, snap_a or snap_b, nonfinite)


def _sign_change_positions(v):
    v = np.asarray(v, dtype=float)
    running = np.maximum.accumulate(np.abs(v)) if len(v) else v
    sgn = np.where(np.abs(v) <= ZERO_RTOL * running, 0, np.sign(v))
    nz = np.flatnonzero(sgn)
    flips = nz[1:][sgn[nz[1:]] != sgn[nz[:-1]]]
    return sgn, flips


def sign_changes(x, from_index: int = 0) -> Tuple[int, Optional[int]]:
    """Number of strict sign alternations from local index ``from_index`` and where the last one happened.

    A sample is treated as zero when ``|x| <= 1e-12`` times the running maximum.
    """
    vals = x.values if isinstance(x, GridFn) else np.asarray(x, dtype=float)
    _, flips = _sign_change_positions(np.asarray(vals, dtype=float)[from_index:])
    if len(flips) == 0:
        return 0, None
    return len(flips), int(flips[-1]) + from_index


def asymptotic_trend(x) -> str:
    """``tends-to-zero``, ``unbounded``, ``bounded-away`` or ``undetermined`` from quarter statistics."""
    v = np.abs(np.asarray(x.values if isinstance(x, GridFn) else x, dtype=float))
    N = len(v)
    if N < 100:
        raise WindowTooShort(f"trend analysis needs at least 100 points, got {N}")
    q = [v[k * N // 4 : (k + 1) * N // 4] for k in range(4)]
    qmax = [float(p.max()) for p in q]
    gmax = float(v.max())
    tail = q[-1]
    if gmax == 0:
        return "tends-to-zero"
    if tail.max() < 1e-3 * gmax and all(a >= b for a, b in zip(qmax, qmax[1:])):
        return "tends-to-zero"
    growing = all(b > a for a, b in zip(qmax, qmax[1:]))
    if growing and (tail.max() >= 10 * np.median(v) or tail.max() >= 2 * v[: N // 2].max()):
        return "unbounded"
    raw = np.asarray(x.values if isinstance(x, GridFn) else x, dtype=float)[-len(tail):]
    if tail.min() >= 1e-3 * gmax and sign_changes(raw)[0] == 0:
        return "bounded-away"
    return "undetermined"


DEFAULT_CRITERION_POINTS = {"q-difference": 41, "difference": 5000, "continuous": 2000}


def reproduce_example(example_id: str, params=None, horizon: Optional[int] = None,
                      gamma: float = 0.25, criterion_points: Optional[int] = None,
                      simulate_continuous: bool = False, phi="1") -> dict:
    """Closed-form threshold, numeric criteria, divergence, conclusion and (discrete examples) a simulation."""
    p = example_params(example_id, params)
    thr = threshold_closed_form(example_id, p)
    report = {"example": example_id, "params": p, "threshold": thr.as_dict()}
    if example_id == "continuous":
        report["beta0_crossover"] = continuous_crossover(p["n"])
        if not simulate_continuous:
            return report
    spec = example_spec(example_id, p)
    pts = criterion_points or DEFAULT_CRITERION_POINTS[example_id]
    windows = criterion_windows(spec, gamma, pts)
    expo = criterion_exponential(spec, points=pts)
    bundle = CriterionBundle(expo, windows)
    div = divergence_check(spec, pts)
    verdict = conclude(spec, bundle, div)
    report.update({
        "spec": spec.to_dict(), "criteria": bundle.as_dict(),
        "divergence": div.as_dict(), "conclusion": verdict.as_dict(),
    })
    if horizon is None:
        horizon = {"q-difference": 200, "difference": 5000, "continuous": 20000}[example_id]
    init = InitialData.from_expression(spec, phi)
    trace = step_ivp(spec, init, horizon)
    report["simulation"] = trace.as_dict()
    report["_trace"] = trace
    report["_bundle"] = bundle
    return report
