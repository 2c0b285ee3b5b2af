"""Delta calculus for sampled functions on discrete time scales.

Values are either float arrays or object arrays of :class:`fractions.Fraction`.
The exact variant is picked up automatically from the dtype, in which case the
scale's exact points are used for the graininess too.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import AtRightEndpoint, NotRegressive, OutOfWindow, WindowTooShort
from .scale import GridWindow, TimeScale


@dataclass(frozen=True, eq=False)
class GridFn:
    """A real function sampled on every point of a :class:`GridWindow`."""

    window: GridWindow
    values: np.ndarray

    def __post_init__(self):
        vals = self.values
        if not isinstance(vals, np.ndarray):
            vals = np.asarray(vals)
            if vals.dtype != object:
                vals = vals.astype(float)
            object.__setattr__(self, "values", vals)
        if len(vals) != len(self.window):
            raise ValueError(f"{len(vals)} values for a window of {len(self.window)} points")

    @classmethod
    def from_function(cls, scale: TimeScale, start: int, end: int, func: Callable, exact=False) -> "GridFn":
        window = GridWindow(scale, start, end)
        pts = window.points(exact=exact)
        if exact:
            vals = np.array([func(p) for p in pts], dtype=object)
        else:
            vals = np.asarray(func(pts), dtype=float)
            if vals.shape == ():
                vals = np.full(len(pts), float(vals))
        return cls(window, vals)

    @property
    def scale(self) -> TimeScale:
        return self.window.scale

    @property
    def exact(self) -> bool:
        return self.values.dtype == object

    @property
    def t(self) -> np.ndarray:
        return self.window.points(exact=self.exact)

    @property
    def mu(self) -> np.ndarray:
        return self.window.mu(exact=self.exact)

    def __len__(self):
        return len(self.values)

    def index(self, t) -> int:
        """Global scale index of the point ``t``; must lie in the window."""
        i = self.scale.index_of(t)
        if not self.window.contains(i):
            raise OutOfWindow(f"{t} lies outside the sampled window")
        return i

    def at_index(self, i: int):
        return self.values[self.window.local(i)]

    def __call__(self, t):
        return self.at_index(self.index(t))

    def restrict(self, start: int, end: int) -> "GridFn":
        w = GridWindow(self.scale, start, end)
        lo = self.window.local(start)
        hi = self.window.local(end)
        return GridFn(w, self.values[lo : hi + 1])


def delta_derivative(f: GridFn, t) -> float:
    """``(f(sigma(t)) - f(t)) / mu(t)`` at a single point."""
    i = f.index(t)
    if i >= f.window.end:
        raise AtRightEndpoint(f"{t} is the last sampled point; f(sigma(t)) is unknown")
    pts = f.scale.points(i, i + 1, exact=f.exact)
    return (f.at_index(i + 1) - f.at_index(i)) / (pts[1] - pts[0])


def delta_derivative_n(f: GridFn, k: int) -> GridFn:
    """k-th delta derivative; the window loses ``k`` points at the right."""
    if k < 0:
        raise ValueError("derivative order must be nonnegative")
    if k == 0:
        return f
    if len(f) <= k:
        raise WindowTooShort(f"window of {len(f)} points cannot carry a derivative of order {k}")
    vals = f.values
    mu = f.mu
    for j in range(k):
        vals = (vals[1:] - vals[:-1]) / mu[: len(vals) - 1]
    return GridFn(f.window.shrink_right(k), vals)


def derivative_stack(f: GridFn, n: int) -> list:
    """``[f, f^Δ, ..., f^{Δ^n}]`` as raw value arrays (lengths ``N, N-1, ..., N-n``)."""
    if len(f) <= n:
        raise WindowTooShort(f"window of {len(f)} points cannot carry a derivative of order {n}")
    out = [f.values]
    mu = f.mu
    for _ in range(n):
        v = out[-1]
        out.append((v[1:] - v[:-1]) / mu[: len(v) - 1])
    return out


def _span(f: GridFn, s, t):
    i_s, i_t = f.index(s), f.index(t)
    return i_s, i_t


def delta_integral(f: GridFn, s, t):
    """Left-rectangle sum of ``mu * f`` over ``[s, t)``; signed when ``s > t``."""
    i_s, i_t = _span(f, s, t)
    if i_s == i_t:
        return 0 if f.exact else 0.0
    lo, hi = min(i_s, i_t), max(i_s, i_t)
    mu = f.scale.mu(lo, hi - 1, exact=f.exact)
    vals = f.values[f.window.local(lo) : f.window.local(hi)]
    total = (mu * vals).sum()
    return total if i_s < i_t else -total


def _factors(p: GridFn, s, t):
    i_s, i_t = _span(p, s, t)
    if i_s > i_t:
        raise ValueError("requires s <= t")
    if i_s == i_t:
        return np.array([], dtype=p.values.dtype)
    mu = p.scale.mu(i_s, i_t - 1, exact=p.exact)
    return 1 + mu * p.values[p.window.local(i_s) : p.window.local(i_t)]


def is_positively_regressive(p: GridFn, s, t) -> bool:
    """True iff ``1 + mu*p > 0`` at every point of ``[s, t)``."""
    return bool(np.all(_factors(p, s, t) > 0))


def exp_fn(p: GridFn, t, s):
    """Generalized exponential ``e_p(t, s)`` for ``s <= t`` as a product of ``1 + mu*p``."""
    fac = _factors(p, s, t)
    if np.any(fac <= 0):
        raise NotRegressive("1 + mu*p must stay positive on [s, t)")
    if len(fac) == 0:
        return 1
    return fac.prod() if p.exact else float(np.prod(fac))
