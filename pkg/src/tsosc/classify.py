"""Kiguradze sign classification and numeric checks of the Philos inequality."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple

import numpy as np

from .calculus import GridFn, derivative_stack
from .errors import (
    HypothesisViolated,
    NotFoundInWindow,
    PatternNotFound,
    TailVanishes,
    WindowTooShort,
)
from .monomials import first_arg_table
from .scale import GridWindow, TimeScale, Uniform, to_fraction

MIN_TAIL_FRACTION = 0.25
TAIL_FLOOR = 1e-6


@dataclass(frozen=True)
class KiguradzeProfile:
    """Key number ``m`` and the first window index (local) of the verified sign pattern."""

    n: int
    m: int
    s_index: int
    signs: Tuple[int, ...]
    tail_length: int

    def as_dict(self):
        return {"n": self.n, "m": self.m, "s_index": self.s_index,
                "signs": list(self.signs), "tail_length": self.tail_length}


def expected_signs(n: int, m: int) -> Tuple[int, ...]:
    """Sign of ``f^{Δ^k}`` for ``k < n`` under key number ``m``."""
    return tuple(1 if k < m else (-1) ** (m + k) for k in range(n))


def local_scales(f: GridFn, n: int) -> list:
    """Rounding scale of each difference quotient: the same recursion applied to ``|f|``.

    ``S^k(i) = (S^{k-1}(i+1) + S^{k-1}(i)) / mu_i``; a computed ``f^{Δ^k}(i)``
    carries an error of order ``eps * S^k(i)``.
    """
    mu = np.asarray(f.mu, dtype=float)
    out = [np.abs(np.asarray(f.values, dtype=float))]
    for _ in range(n):
        v = out[-1]
        out.append((v[1:] + v[:-1]) / mu[: len(v) - 1])
    return out


def _tolerances(f, n, strict_tol):
    if f.exact:
        return [0] * (n + 1)
    return [strict_tol * sc for sc in local_scales(f, n)]


def kiguradze_profile(f: GridFn, n: int, strict_tol: float = 1e-12) -> KiguradzeProfile:
    """Find ``m`` and the earliest index from which the Kiguradze pattern holds to the window end.

    A float sample of ``f^{Δ^k}`` counts as zero when its magnitude is within
    ``strict_tol`` times its local rounding scale (see :func:`local_scales`).
    Exact (rational) inputs are classified without tolerance.
    """
    if n < 1:
        raise ValueError("order n must be positive")
    if len(f) < 4 * n:
        raise WindowTooShort(f"need at least {4 * n} points, got {len(f)}")
    stack = derivative_stack(f, n)
    tols = _tolerances(f, n, strict_tol)
    if np.any(f.values <= 0):
        raise HypothesisViolated("f must be positive on its window")
    dn = stack[n]
    if np.any(dn > tols[n]):
        raise HypothesisViolated("the n-th delta derivative must be nonpositive")
    if np.all(dn >= -tols[n]):
        raise HypothesisViolated("the n-th delta derivative vanishes identically")

    L = len(dn)
    # strict sign of each order at each common index; 0 inside tolerance
    sg = np.zeros((n, L), dtype=int)
    for k in range(n):
        d = stack[k][:L]
        tk = tols[k] if f.exact else tols[k][:L]
        sg[k] = np.where(d > tk, 1, np.where(d < -tk, -1, 0))

    last = tuple(int(v) for v in sg[:, -1])
    m = next((m for m in range(n - 1, -1, -1) if (n - m) % 2 == 1 and last == expected_signs(n, m)), None)
    if m is None:
        raise PatternNotFound(f"no admissible key number matches the final signs {last}")
    ok = np.all(sg == np.array(expected_signs(n, m))[:, None], axis=0)
    bad = np.flatnonzero(~ok)
    s_index = int(bad[-1] + 1) if len(bad) else 0
    tail = L - s_index
    if tail < MIN_TAIL_FRACTION * L:
        raise PatternNotFound(f"pattern holds only on the last {tail} of {L} points")
    return KiguradzeProfile(n=n, m=m, s_index=s_index, signs=expected_signs(n, m), tail_length=tail)


@dataclass(frozen=True)
class PhilosResult:
    min_slack: float
    min_normalized: float
    where: int
    checked: int
    tol: float = 1e-10

    @property
    def passed(self) -> bool:
        return self.min_normalized >= -self.tol


def _philos_terms(f: GridFn, n: int, base_index: int, start_local: int):
    stack = derivative_stack(f, n - 1)
    d = stack[n - 1]
    lo = f.window.start + start_local
    hi = f.window.start + len(d) - 1
    h = first_arg_table(f.scale, n - 1, base_index, lo, hi, exact=f.exact)[n - 1]
    vals = f.values[start_local : len(d)]
    return vals, h, d[start_local:]


def _as_float(x):
    return np.array([float(v) for v in x]) if getattr(x, "dtype", None) == object else np.asarray(x, dtype=float)


def verify_philos(f: GridFn, n: int, profile: KiguradzeProfile, tol: float = 1e-10) -> PhilosResult:
    """Worst slack of ``f(t) - h_{n-1}(t, s) f^{Δ^{n-1}}(t)`` over ``t >= s``.

    Only meaningful for ``m >= 1``: with ``m = 0`` the inequality is false in
    general (``f = 2^{-t}`` on Z with ``n = 3`` fails from ``t = s + 4``), so
    that case raises :class:`HypothesisViolated`; use :func:`verify_philos_lambda`.
    """
    if n < 2:
        raise ValueError("the inequality needs n >= 2")
    if profile.m == 0:
        raise HypothesisViolated("key number m = 0: the inequality needs f increasing (m >= 1)")
    s_glob = f.window.start + profile.s_index
    vals, h, d = _philos_terms(f, n, s_glob, profile.s_index)
    slack = _as_float(vals - h * d)
    norm = slack / np.maximum(1.0, np.abs(_as_float(vals)))
    j = int(np.argmin(norm))
    return PhilosResult(float(slack[j]), float(norm[j]), profile.s_index + j, len(slack), tol)


def philos_slack(f: GridFn, n: int, s_local: int) -> np.ndarray:
    """Raw slack sequence ``f(t) - h_{n-1}(t,s) f^{Δ^{n-1}}(t)`` without any hypothesis check."""
    vals, h, d = _philos_terms(f, n, f.window.start + s_local, s_local)
    return _as_float(vals - h * d)


def verify_philos_lambda(f: GridFn, n: int, lam: float, t0, profile: KiguradzeProfile,
                         tol: float = 1e-10) -> Tuple[int, float]:
    """First local index ``r >= s`` from which ``f >= lam h_{n-1}(t,t0) f^{Δ^{n-1}}`` holds to the end.

    Returns ``(r, worst normalized slack on [r, end])``.
    """
    if not 0 < lam < 1:
        raise ValueError("lambda must lie in (0, 1)")
    fv = _as_float(f.values)
    tail = fv[int(len(fv) * (1 - MIN_TAIL_FRACTION)) :]
    if tail.min() < TAIL_FLOOR * fv.max():
        raise TailVanishes("f appears to tend to zero; the lambda inequality needs a nonzero limit")
    t0_index = f.scale.index_of(t0)
    vals, h, d = _philos_terms(f, n, t0_index, profile.s_index)
    if f.exact:
        lam = to_fraction(lam)
    slack = _as_float(vals - lam * h * d)
    norm = slack / np.maximum(1.0, np.abs(_as_float(vals)))
    ok = norm >= -tol
    if not ok[-1]:
        raise NotFoundInWindow("the inequality fails at the last window point")
    bad = np.flatnonzero(~ok)
    r = int(bad[-1] + 1) if len(bad) else 0
    return profile.s_index + r, float(norm[r:].min())


def decay_check(f: GridFn, n: int, profile: KiguradzeProfile) -> Dict[int, float]:
    """Max ``|f^{Δ^k}|`` over the last quarter of the window for each ``k`` strictly between ``m`` and ``n``."""
    out = {}
    if profile.m + 1 >= n:
        return out
    stack = derivative_stack(f, n - 1)
    for k in range(profile.m + 1, n):
        d = _as_float(stack[k])
        out[k] = float(np.max(np.abs(d[int(len(d) * (1 - MIN_TAIL_FRACTION)) :])))
    return out


# -- test-harness constructors -------------------------------------------------

def construct_kiguradze_function(ts: TimeScale, start: int, length: int, n: int, m: int,
                                 rng: np.random.Generator, exact: bool = False,
                                 decay: Optional[float] = None) -> GridFn:
    """Positive ``f`` with ``f^{Δ^n} < 0`` whose Kiguradze key number is ``m`` on the whole window.

    The n-th delta is drawn at random; orders ``k >= m`` are integrated
    backwards from the window end with end values of sign ``(-1)^{m+k}``,
    orders ``k < m`` forwards from positive start values.  On non-uniform
    scales the n-th delta decays like ``t^{-decay}`` (default ``n - m + 1``) so
    that every backward-integrated order has decaying increments; otherwise
    late increments swamp early values and differencing loses all digits.
    """
    if not 0 <= m < n or (n - m) % 2 == 0:
        raise ValueError(f"m={m} is not admissible for n={n}")
    if length < n + 1:
        raise WindowTooShort("window too short for the requested order")
    mu = ts.mu(start, start + length - 2, exact=exact)
    if decay is None:
        decay = 0 if ts.kind == "uniform" else n - m + 1
    pts = ts.points(start, start + length - 1)
    weight = (pts / pts[0]) ** (-decay) if decay else np.ones(length)

    def draw(lo, hi):
        v = rng.uniform(lo, hi)
        return Fraction(v).limit_denominator(1000) if exact else v

    size = length - n
    d = [-draw(0.5, 1.5) * (to_fraction(weight[i]) if exact else weight[i]) for i in range(size)]
    d = np.array(d, dtype=object if exact else float)
    for k in range(n - 1, -1, -1):
        size += 1
        inc = mu[: size - 1] * d
        new = np.empty(size, dtype=d.dtype)
        if k >= m:
            # end value comparable to the last increment keeps differencing well conditioned
            new[-1] = (-1) ** (m + k) * draw(0.25, 1.0) * abs(inc[-1])
            new[:-1] = new[-1] - _rev_cum(inc)
        else:
            new[0] = draw(0.25, 1.0) * (abs(inc[0]) + abs(d[0]))
            new[1:] = new[0] + np.cumsum(inc)
        d = new
    return GridFn(GridWindow(ts, start, start + length - 1), d)


def _rev_cum(x):
    return np.cumsum(x[::-1])[::-1]


def construct_geometric_tail(n: int, m: int, length: int, *, rate=Fraction(1, 2), amplitude=Fraction(1),
                             limit=Fraction(1), start_values=None, exact: bool = True) -> GridFn:
    """Function on ``Z`` (from 0) with ``f^{Δ^n}(t) = -amplitude * rate^t``.

    Orders strictly between ``m`` and ``n`` are the exact infinite tails, so
    they tend to zero; ``f^{Δ^m}`` tends to ``limit``.  Orders below ``m`` are
    integrated forwards from ``start_values`` (default all ones).
    """
    if not 0 <= m < n or (n - m) % 2 == 0:
        raise ValueError(f"m={m} is not admissible for n={n}")
    conv = (lambda x: to_fraction(x)) if exact else float
    rate, amplitude, limit = conv(rate), conv(amplitude), conv(limit)
    c = 1 / (1 - rate)
    idx = range(length + n)
    powers = [rate**i for i in idx]
    # closed form of order k >= m on the full extended range
    def order(k):
        coef = (-1) ** (n - k + 1) * amplitude * c ** (n - k)
        vals = [coef * p for p in powers]
        if k == m:
            vals = [limit + v for v in vals]
        return vals

    d = order(m)
    for k in range(m - 1, -1, -1):
        first = conv(1) if start_values is None else conv(start_values[k])
        acc = [first]
        for v in d[:-1]:
            acc.append(acc[-1] + v)
        d = acc
    vals = np.array(d[:length], dtype=object if exact else float)
    return GridFn(GridWindow(Uniform(1, 0), 0, length - 1), vals)
