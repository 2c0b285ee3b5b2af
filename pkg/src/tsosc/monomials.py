"""Generalized monomials ``h_k``, ``g_k`` and the identities built on them.

``h_k(t, s)`` is computed by iterated delta integration.  Tables are built as
cumulative sums, so a whole row over a window costs O(N) per order.  When many
second arguments are needed for a fixed first argument (Taylor remainders,
the convolution identity) the second-argument recursion

    h_k(t, s) = int_s^t h_{k-1}(t, sigma(eta)) Delta eta

is used instead of one table per second argument.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Tuple

import numpy as np

from .calculus import GridFn, derivative_stack
from .errors import BadOrder, NegativeOrder, WindowTooShort
from .scale import Geometric, GridWindow, TimeScale, to_fraction


def _ones(n, exact):
    if exact:
        return np.array([Fraction(1)] * n, dtype=object)
    return np.ones(n)


def _zeros(n, exact):
    if exact:
        return np.array([Fraction(0)] * n, dtype=object)
    return np.zeros(n)


def _rev_cumsum(x):
    return np.cumsum(x[::-1])[::-1]


def first_arg_table(ts: TimeScale, max_k: int, s_index: int, lo: int, hi: int,
                    exact: bool = False, shifted: bool = False) -> np.ndarray:
    """Rows ``h_j(p_i, s)`` for ``j <= max_k`` and indices ``lo..hi``.

    With ``shifted=True`` the integrand is evaluated at ``sigma(eta)``, which
    gives the companion polynomials ``g_j`` instead.
    """
    if max_k < 0:
        raise NegativeOrder(f"order must be nonnegative, got {max_k}")
    a, b = min(lo, s_index), max(hi, s_index)
    n = b - a + 1
    mu = ts.mu(a, b - 1, exact=exact) if b > a else _zeros(0, exact)
    cut = s_index - a
    table = np.empty((max_k + 1, n), dtype=object if exact else float)
    table[0] = _ones(n, exact)
    for j in range(1, max_k + 1):
        prev = table[j - 1]
        terms = mu * (prev[1:] if shifted else prev[:-1])
        row = _zeros(n, exact)
        if cut < n - 1:
            row[cut + 1 :] = np.cumsum(terms[cut:])
        if cut > 0:
            row[:cut] = -_rev_cumsum(terms[:cut])
        table[j] = row
    return table[:, lo - a : hi - a + 1]


def second_arg_table(ts: TimeScale, max_k: int, t_index: int, lo: int, hi: int,
                     exact: bool = False) -> np.ndarray:
    """Rows ``h_j(t, p_i)`` for fixed ``t`` and indices ``lo..hi``."""
    if max_k < 0:
        raise NegativeOrder(f"order must be nonnegative, got {max_k}")
    a, b = min(lo, t_index), max(hi, t_index)
    n = b - a + 1
    mu = ts.mu(a, b - 1, exact=exact) if b > a else _zeros(0, exact)
    cut = t_index - a
    table = np.empty((max_k + 1, n), dtype=object if exact else float)
    table[0] = _ones(n, exact)
    for j in range(1, max_k + 1):
        terms = mu * table[j - 1][1:]
        row = _zeros(n, exact)
        if cut > 0:
            row[:cut] = _rev_cumsum(terms[:cut])
        if cut < n - 1:
            row[cut + 1 :] = -np.cumsum(terms[cut:])
        table[j] = row
    return table[:, lo - a : hi - a + 1]


@dataclass(frozen=True, eq=False)
class MonomialTable:
    """Precomputed ``h_k(t, s)`` (or ``g_k``) for one base point and a window of ``t``."""

    scale: TimeScale
    base_index: int
    max_k: int
    lo: int
    hi: int
    kind: str = "h"
    exact: bool = False
    table: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        tab = first_arg_table(self.scale, self.max_k, self.base_index, self.lo, self.hi,
                              exact=self.exact, shifted=(self.kind == "g"))
        object.__setattr__(self, "table", tab)

    def row(self, k: int) -> np.ndarray:
        return self.table[k]

    def value(self, k: int, t):
        i = self.scale.index_of(t)
        return self.table[k, i - self.lo]


def _orders_and_indices(ts, k, t, s):
    if k < 0:
        raise NegativeOrder(f"order must be nonnegative, got {k}")
    return ts.index_of(t), ts.index_of(s)


def h_poly(ts: TimeScale, k: int, t, s, exact: bool = False):
    """``h_k(t, s)`` by the integral recursion; signed for ``t < s``."""
    it, i_s = _orders_and_indices(ts, k, t, s)
    tab = first_arg_table(ts, k, i_s, min(it, i_s), max(it, i_s), exact=exact)
    return tab[k, it - min(it, i_s)]


def g_poly(ts: TimeScale, k: int, t, s, exact: bool = False):
    """Companion polynomial ``g_k(t, s)`` (integrand taken at ``sigma(eta)``)."""
    it, i_s = _orders_and_indices(ts, k, t, s)
    tab = first_arg_table(ts, k, i_s, min(it, i_s), max(it, i_s), exact=exact, shifted=True)
    return tab[k, it - min(it, i_s)]


def q_int(q, i: int):
    """``1 + q + ... + q^{i-1}``; equals ``i`` at ``q = 1``."""
    return sum(q**j for j in range(i)) if i > 0 else 0 * q


def q_gamma(q, n: int):
    """q-Gamma at a positive integer: ``prod_{i=1}^{n-1} (q^i - 1)/(q - 1)``.

    Evaluated as a product of q-integers, which is exact in rational arithmetic
    and avoids cancellation for ``q`` close to one.  ``q_gamma(1, n) == (n-1)!``.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise BadOrder(f"q-Gamma is defined here for positive integers, got {n}")
    out = q**0
    for i in range(1, n):
        out = out * q_int(q, i)
    return out


def h_closed_uniform(h, n: int, t, s):
    """Closed form on ``hZ``: ``prod_{i<n} (t - i h - s) / n!``."""
    out = 1
    for i in range(n):
        out = out * (t - i * h - s)
    return out / math.factorial(n)


def h_closed_linear_jump(q, h, n: int, t, s):
    """Closed form for a forward jump ``sigma(x) = q x + h``.

    The product ``prod_{i<n} (t - sigma^i(s))`` is normalised by the q-Gamma
    value at ``n + 1`` (the q-factorial of ``n``), which reduces to ``n!`` when
    ``q = 1``.
    """
    if n < 0:
        raise NegativeOrder(f"order must be nonnegative, got {n}")
    out = 1
    sig = s
    for _ in range(n):
        out = out * (t - sig)
        sig = q * sig + h
    return out / q_gamma(q, n + 1)


def h_closed_geometric(q, n: int, t, s):
    """Closed form on ``q^Z``: ``prod_{i<n} (t - q^i s) / (1 + q + ... + q^i)``."""
    return h_closed_linear_jump(q, 0, n, t, s)


def taylor_eval(f: GridFn, n: int, s, t) -> Tuple[float, float]:
    """Polynomial part and integral remainder of the order-``n`` Taylor expansion of ``f`` at ``s``."""
    if n < 1:
        raise BadOrder("Taylor expansion needs n >= 1")
    ts = f.scale
    i_s, it = f.index(s), f.index(t)
    last = f.window.end - n + 1
    if max(i_s, it) > last:
        raise WindowTooShort(f"window too short for order-{n} derivatives up to {max(s, t)}")
    stack = derivative_stack(f, n)
    ls = i_s - f.window.start
    hs = first_arg_table(ts, n - 1, i_s, it, it, exact=f.exact)[:, 0]
    sum_part = sum(hs[k] * stack[k][ls] for k in range(n))
    if it == i_s:
        return sum_part, 0 * sum_part
    lo, hi = min(i_s, it), max(i_s, it)
    # h_{n-1}(t, sigma(eta)) for eta in [lo, hi)
    kt = second_arg_table(ts, n - 1, it, lo, hi, exact=f.exact)[n - 1, 1:]
    mu = ts.mu(lo, hi - 1, exact=f.exact)
    dn = stack[n][lo - f.window.start : hi - f.window.start]
    rem = (mu * kt * dn).sum()
    return sum_part, (rem if it > i_s else -rem)


def taylor_parts(f: GridFn, n: int, s):
    """``taylor_eval`` at every admissible ``t`` of the window at once.

    Returns ``(t, sum_part, remainder)`` arrays; derivatives and the monomial
    table are computed once.
    """
    if n < 1:
        raise BadOrder("Taylor expansion needs n >= 1")
    ts = f.scale
    i_s = f.index(s)
    start, last = f.window.start, f.window.end - n + 1
    if i_s > last:
        raise WindowTooShort(f"window too short for order-{n} derivatives at {s}")
    stack = derivative_stack(f, n)
    ls = i_s - start
    hs = first_arg_table(ts, n - 1, i_s, start, last, exact=f.exact)
    sum_part = sum(hs[k] * stack[k][ls] for k in range(n))
    mu = ts.mu(start, last - 1, exact=f.exact) if last > start else _zeros(0, f.exact)
    dn = stack[n][: last - start + 1]
    rem = _zeros(last - start + 1, f.exact)
    for it in range(start, last + 1):
        if it == i_s:
            continue
        lo, hi = min(i_s, it), max(i_s, it)
        kt = second_arg_table(ts, n - 1, it, lo, hi, exact=f.exact)[n - 1, 1:]
        r = (mu[lo - start : hi - start] * kt * dn[lo - start : hi - start]).sum()
        rem[it - start] = r if it > i_s else -r
    return f.t[: last - start + 1], sum_part, rem


def convolution_terms(ts: TimeScale, k: int, l: int, s, t, exact: bool = False):
    """Both sides of ``h_{k+l}(t,s) = int_s^t h_{k-1}(t, sigma(eta)) h_l(eta, s) Delta eta``."""
    if k < 1 or l < 0:
        raise BadOrder("convolution identity needs k >= 1 and l >= 0")
    it, i_s = ts.index_of(t), ts.index_of(s)
    lo, hi = min(it, i_s), max(it, i_s)
    hs = first_arg_table(ts, k + l, i_s, lo, hi, exact=exact)
    lhs = hs[k + l, it - lo]
    if it == i_s:
        return lhs, 0 * lhs
    kt = second_arg_table(ts, k - 1, it, lo, hi, exact=exact)[k - 1, 1:]
    mu = ts.mu(lo, hi - 1, exact=exact)
    rhs = (mu * kt * hs[l, :-1]).sum()
    return lhs, (rhs if it > i_s else -rhs)


def convolution_residual(ts: TimeScale, k: int, l: int, s, t, exact: bool = False):
    lhs, rhs = convolution_terms(ts, k, l, s, t, exact=exact)
    return abs(lhs - rhs)


@dataclass
class LemmaSlack:
    """Worst observed ``LHS - RHS`` for one inequality family."""

    name: str
    min_slack: float = math.inf
    min_normalized: float = math.inf
    where: Optional[dict] = None
    checked: int = 0
    tol: float = 1e-12

    def update(self, lhs, rhs, **where):
        lhs = np.asarray(lhs, dtype=float)
        rhs = np.asarray(rhs, dtype=float)
        slack = lhs - rhs
        norm = slack / np.maximum(1.0, np.abs(rhs))
        self.checked += slack.size
        j = int(np.argmin(norm))
        if norm.flat[j] < self.min_normalized:
            self.min_normalized = float(norm.flat[j])
            self.min_slack = float(slack.flat[j])
            self.where = {key: (val[j] if isinstance(val, np.ndarray) else val) for key, val in where.items()}
            self.where = {key: (val.item() if hasattr(val, "item") else val) for key, val in self.where.items()}

    @property
    def passed(self) -> bool:
        return self.min_normalized >= -self.tol

    def as_dict(self):
        return {
            "min_slack": self.min_slack,
            "min_normalized_slack": self.min_normalized,
            "where": self.where,
            "checked": self.checked,
            "passed": self.passed,
        }


def check_lemma_inequalities(ts: TimeScale, kmax: int, lmax: int, s, window, tol: float = 1e-12) -> Dict[str, LemmaSlack]:
    """Worst slack of the four monomial inequalities for all ``t >= s`` in ``window``.

    ``window`` is a :class:`GridWindow` or an ``(lo, hi)`` index pair.  The
    families are ``swap`` ((-1)^k h_k(s,t) >= h_k(t,s)), ``product``
    (h_k h_l >= h_{k+l}), ``convolution`` ((-1)^l int_s^t h_{k-1}(t,sigma) h_l(eta,t) >= h_{k+l})
    and ``g_ge_h``.
    """
    if isinstance(window, GridWindow):
        lo, hi = window.start, window.end
    else:
        lo, hi = window
    i_s = ts.index_of(s)
    if i_s > hi:
        raise ValueError("no window point at or after s")
    lo = max(lo, i_s)
    idx = np.arange(lo, hi + 1)
    hs = first_arg_table(ts, kmax + lmax, i_s, lo, hi)
    gs = first_arg_table(ts, kmax, i_s, lo, hi, shifted=True)
    hsw = second_arg_table(ts, kmax, i_s, lo, hi)
    rep = {name: LemmaSlack(name, tol=tol) for name in ("swap", "product", "convolution", "g_ge_h")}

    for k in range(kmax + 1):
        rep["swap"].update((-1) ** k * hsw[k], hs[k], k=k, t_index=idx)
        rep["g_ge_h"].update(gs[k], hs[k], k=k, t_index=idx)
        for l in range(lmax + 1):
            rep["product"].update(hs[k] * hs[l], hs[k + l], k=k, l=l, t_index=idx)

    if kmax >= 1:
        signs = (-1.0) ** np.arange(lmax + 1)
        for it in range(lo, hi + 1):
            col = it - lo
            if it == i_s:
                integ = np.zeros((kmax, lmax + 1))
            else:
                kt = second_arg_table(ts, kmax - 1, it, i_s, it)[:, 1:]
                ht = first_arg_table(ts, lmax, it, i_s, it)[:, :-1]
                mu = ts.mu(i_s, it - 1)
                integ = (kt * mu) @ ht.T
            lhs = integ * signs
            rhs = np.array([[hs[k + l, col] for l in range(lmax + 1)] for k in range(1, kmax + 1)])
            kk, ll = np.meshgrid(np.arange(1, kmax + 1), np.arange(lmax + 1), indexing="ij")
            rep["convolution"].update(lhs, rhs, k=kk.ravel(), l=ll.ravel(), t_index=it)
    return rep


def limit_ratio_check(q, n: int, direction: str = "t", exponent: int = 20) -> Tuple[float, float]:
    """Ratio ``h_n(t,s)/t^n`` (or ``/s^n``) at ``q**exponent`` and its closed-form limit.

    The other argument is fixed at 1 on the scale ``q^Z``.
    """
    if n < 0:
        raise NegativeOrder(f"order must be nonnegative, got {n}")
    ts = Geometric(q, 1.0)
    big = ts.point(exponent)
    if n == 0:
        return 1.0, 1.0
    if direction == "t":
        ratio = h_poly(ts, n, big, 1.0) / big**n
        limit = 1.0 / q_gamma(q, n + 1)
    elif direction == "s":
        ratio = h_poly(ts, n, 1.0, big) / big**n
        limit = (-1) ** n * q ** (n * (n - 1) / 2) / q_gamma(q, n + 1)
    else:
        raise ValueError("direction must be 't' or 's'")
    return float(ratio), float(limit)
