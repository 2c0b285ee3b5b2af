"""Discrete time scales and their jump operators.

Every supported scale enumerates its points by integer index.  Uniform and
geometric scales are unbounded in both directions and compute ``point(i)``
directly from the anchor (never by accumulation), explicit scales are finite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from .errors import (
    AtLeftEndpoint,
    AtRightEndpoint,
    BelowWindow,
    EmptyIntersection,
    NotAPoint,
    OutOfWindow,
    ValidationError,
)

# relative tolerance used to recognise a float as an exact hit on a scale point;
# never more than a small fraction of the local spacing
_HIT_RTOL = 1e-9
_HIT_SPACING_FRACTION = 1e-3


def _hit_tol(p, spacing):
    return np.minimum(_HIT_RTOL * np.maximum(np.abs(p), spacing), _HIT_SPACING_FRACTION * spacing)


def to_fraction(x) -> Fraction:
    """Exact rational for ``x``; floats go through their shortest repr so 0.1 -> 1/10."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    return Fraction(repr(float(x)))


class TimeScale:
    """Common interface; see :class:`Uniform`, :class:`Geometric`, :class:`Explicit`."""

    kind: str = ""
    min_index: Optional[int] = None
    max_index: Optional[int] = None
    is_discrete = True

    # -- enumeration -------------------------------------------------------
    def point(self, i: int) -> float:
        raise NotImplementedError

    def point_exact(self, i: int) -> Fraction:
        raise NotImplementedError

    def points(self, lo: int, hi: int, exact: bool = False) -> np.ndarray:
        """Points with indices ``lo..hi`` inclusive."""
        self.check_index(lo)
        self.check_index(hi)
        if exact:
            return np.array([self.point_exact(i) for i in range(lo, hi + 1)], dtype=object)
        return self._points_float(lo, hi)

    def _points_float(self, lo, hi):
        return np.array([self.point(i) for i in range(lo, hi + 1)], dtype=float)

    def mu(self, lo: int, hi: int, exact: bool = False) -> np.ndarray:
        """Graininess ``sigma(t) - t`` at indices ``lo..hi``."""
        pts = self.points(lo, hi + 1, exact=exact)
        return pts[1:] - pts[:-1]

    def check_index(self, i: int) -> None:
        if self.min_index is not None and i < self.min_index:
            raise OutOfWindow(f"index {i} below first point of {self!r}")
        if self.max_index is not None and i > self.max_index:
            raise OutOfWindow(f"index {i} beyond last point of {self!r}")

    # -- lookup ------------------------------------------------------------
    def index_of(self, t) -> int:
        raise NotImplementedError

    def snap_down_index(self, v) -> int:
        raise NotImplementedError

    def snap_down_indices(self, values: np.ndarray) -> np.ndarray:
        return np.array([self.snap_down_index(v) for v in np.asarray(values, dtype=float)], dtype=np.int64)

    def _is_hit(self, i, t) -> bool:
        if isinstance(t, Fraction):
            return self.point_exact(i) == t
        p = self.point(i)
        return abs(p - float(t)) <= _hit_tol(p, self._spacing(i))

    def _spacing(self, i) -> float:
        if self.max_index is not None and i >= self.max_index:
            return self.point(i) - self.point(i - 1)
        return self.point(i + 1) - self.point(i)

    def grid_indices(self, a, b) -> Tuple[int, int]:
        """Index range of points lying in ``[a, b]``."""
        if a > b:
            raise ValueError("grid requires a <= b")
        try:
            hi = self.snap_down_index(b)
        except BelowWindow:
            raise EmptyIntersection(f"no point of {self!r} in [{a}, {b}]") from None
        lo = self._snap_up_index(a)
        if lo is None or lo > hi:
            raise EmptyIntersection(f"no point of {self!r} in [{a}, {b}]")
        return lo, hi

    def _snap_up_index(self, a) -> Optional[int]:
        try:
            k = self.snap_down_index(a)
        except BelowWindow:
            return self.min_index
        if self._is_hit(k, a):
            return k
        k += 1
        if self.max_index is not None and k > self.max_index:
            return None
        return k

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Uniform(TimeScale):
    """``anchor + h*Z``."""

    h: float
    anchor: float = 0.0
    kind = "uniform"

    def __post_init__(self):
        if not self.h > 0:
            raise ValidationError(f"uniform scale needs h > 0, got {self.h}")

    def point(self, i):
        return float(self.anchor) + i * float(self.h)

    def point_exact(self, i):
        return to_fraction(self.anchor) + i * to_fraction(self.h)

    def _points_float(self, lo, hi):
        return float(self.anchor) + np.arange(lo, hi + 1, dtype=float) * float(self.h)

    def index_of(self, t):
        if isinstance(t, Fraction):
            k = (t - to_fraction(self.anchor)) / to_fraction(self.h)
            if k.denominator != 1:
                raise NotAPoint(f"{t} is not a point of {self!r}")
            return int(k)
        k = int(round((float(t) - float(self.anchor)) / float(self.h)))
        if not self._is_hit(k, t):
            raise NotAPoint(f"{t} is not a point of {self!r}")
        return k

    def snap_down_index(self, v):
        if isinstance(v, Fraction):
            return math.floor((v - to_fraction(self.anchor)) / to_fraction(self.h))
        k = math.floor((float(v) - float(self.anchor)) / float(self.h))
        if self._is_hit(k + 1, v):
            k += 1
        return k

    def snap_down_indices(self, values):
        v = np.asarray(values, dtype=float)
        k = np.floor((v - float(self.anchor)) / float(self.h)).astype(np.int64)
        nxt = float(self.anchor) + (k + 1) * float(self.h)
        k[np.abs(nxt - v) <= _hit_tol(nxt, float(self.h))] += 1
        return k

    def to_dict(self):
        return {"type": "uniform", "h": self.h, "t0": self.anchor}


@dataclass(frozen=True)
class Geometric(TimeScale):
    """``anchor * q**Z`` for ``q > 1`` and a positive anchor."""

    q: float
    anchor: float = 1.0
    kind = "geometric"

    def __post_init__(self):
        if not self.q > 1:
            raise ValidationError(f"geometric scale needs q > 1, got {self.q}")
        if not self.anchor > 0:
            raise ValidationError(f"geometric scale needs a positive anchor, got {self.anchor}")

    def point(self, i):
        return float(self.anchor) * float(self.q) ** i

    def point_exact(self, i):
        return to_fraction(self.anchor) * to_fraction(self.q) ** i

    def _points_float(self, lo, hi):
        return float(self.anchor) * np.power(float(self.q), np.arange(lo, hi + 1, dtype=float))

    def index_of(self, t):
        if t <= 0:
            raise NotAPoint(f"{t} is not a point of {self!r}")
        k = int(round(math.log(float(t) / float(self.anchor)) / math.log(float(self.q))))
        if not self._is_hit(k, t):
            raise NotAPoint(f"{t} is not a point of {self!r}")
        return k

    def snap_down_index(self, v):
        if v <= 0:
            raise BelowWindow(f"no point of {self!r} at or below {v}")
        k = math.floor(math.log(float(v) / float(self.anchor)) / math.log(float(self.q)))
        if self._is_hit(k + 1, v):
            k += 1
        elif not self._is_hit(k, v) and self.point(k) > float(v):
            k -= 1
        return k

    def snap_down_indices(self, values):
        v = np.asarray(values, dtype=float)
        if np.any(v <= 0):
            raise BelowWindow(f"no point of {self!r} at or below {v.min()}")
        lq = math.log(float(self.q))
        k = np.floor(np.log(v / float(self.anchor)) / lq).astype(np.int64)
        nxt = float(self.anchor) * np.power(float(self.q), (k + 1).astype(float))
        k[np.abs(nxt - v) <= _hit_tol(nxt, (float(self.q) - 1) * nxt)] += 1
        return k

    def to_dict(self):
        return {"type": "geometric", "q": self.q, "t0": self.anchor}


@dataclass(frozen=True)
class Explicit(TimeScale):
    """A finite, strictly increasing list of points."""

    values: Tuple[float, ...]
    kind = "explicit"

    def __post_init__(self):
        pts = tuple(self.values)
        if len(pts) < 2:
            raise ValidationError("explicit scale needs at least two points")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValidationError("explicit scale points must be strictly increasing")
        object.__setattr__(self, "values", pts)
        object.__setattr__(self, "_arr", np.array([float(p) for p in pts]))

    @property
    def min_index(self):
        return 0

    @property
    def max_index(self):
        return len(self.values) - 1

    def point(self, i):
        self.check_index(i)
        return float(self.values[i])

    def point_exact(self, i):
        self.check_index(i)
        return to_fraction(self.values[i])

    def _points_float(self, lo, hi):
        return self._arr[lo : hi + 1].copy()

    def index_of(self, t):
        j = int(np.searchsorted(self._arr, float(t)))
        for k in (j - 1, j):
            if 0 <= k < len(self._arr) and self._is_hit(k, t):
                return k
        raise NotAPoint(f"{t} is not a point of this explicit scale")

    def snap_down_index(self, v):
        j = int(np.searchsorted(self._arr, float(v), side="right")) - 1
        if j + 1 < len(self._arr) and self._is_hit(j + 1, v):
            j += 1
        if j < 0:
            raise BelowWindow(f"no explicit point at or below {v}")
        return j

    def to_dict(self):
        return {"type": "explicit", "points": list(self.values)}


@dataclass(frozen=True)
class GridWindow:
    """A contiguous run of scale points, ``start..end`` inclusive."""

    scale: TimeScale
    start: int
    end: int

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError("window start must not exceed its end")
        self.scale.check_index(self.start)
        self.scale.check_index(self.end)

    def __len__(self):
        return self.end - self.start + 1

    def points(self, exact=False):
        return self.scale.points(self.start, self.end, exact=exact)

    def mu(self, exact=False):
        """Graininess at every window point except the last."""
        return self.scale.mu(self.start, self.end - 1, exact=exact) if self.end > self.start else np.array([])

    def contains(self, i: int) -> bool:
        return self.start <= i <= self.end

    def local(self, i: int) -> int:
        if not self.contains(i):
            raise OutOfWindow(f"index {i} outside window [{self.start}, {self.end}]")
        return i - self.start

    def shrink_right(self, k: int) -> "GridWindow":
        return GridWindow(self.scale, self.start, self.end - k)

    @classmethod
    def between(cls, scale: TimeScale, a, b) -> "GridWindow":
        lo, hi = scale.grid_indices(a, b)
        return cls(scale, lo, hi)


def jump_data(ts: TimeScale, t) -> Tuple[float, float, float]:
    """Forward jump, backward jump and graininess at the point ``t``."""
    i = ts.index_of(t)
    if ts.max_index is not None and i >= ts.max_index:
        raise AtRightEndpoint(f"{t} has no successor on this scale")
    if ts.min_index is not None and i <= ts.min_index:
        raise AtLeftEndpoint(f"{t} has no predecessor on this scale")
    sigma = ts.point(i + 1)
    return sigma, ts.point(i - 1), sigma - ts.point(i)


def grid(ts: TimeScale, a, b) -> np.ndarray:
    """All scale points in ``[a, b]``, increasing."""
    lo, hi = ts.grid_indices(a, b)
    return ts.points(lo, hi)


def snap_down(ts: TimeScale, v) -> float:
    """Largest scale point not exceeding ``v``."""
    return ts.point(ts.snap_down_index(v))


def scale_from_dict(d: dict) -> TimeScale:
    kind = d.get("type")
    if kind == "uniform":
        return Uniform(h=d["h"], anchor=d.get("t0", 0.0))
    if kind == "geometric":
        return Geometric(q=d["q"], anchor=d.get("t0", 1.0))
    if kind == "explicit":
        return Explicit(tuple(d["points"]))
    raise ValidationError(f"unknown scale type {kind!r}")
