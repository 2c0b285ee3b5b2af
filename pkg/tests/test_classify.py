from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import forward_differences
from tsosc.calculus import GridFn
from tsosc.classify import (
    KiguradzeProfile,
    construct_geometric_tail,
    construct_kiguradze_function,
    decay_check,
    expected_signs,
    kiguradze_profile,
    local_scales,
    philos_slack,
    verify_philos,
    verify_philos_lambda,
)
from tsosc.errors import HypothesisViolated, NotFoundInWindow, PatternNotFound, TailVanishes, WindowTooShort
from tsosc.scale import Geometric, GridWindow, Uniform

Z = Uniform(1, 0)


def concave_increasing(N=40):
    vals = 1 + np.concatenate([[0.0], np.cumsum(1 / np.arange(1, N))])
    return GridFn(GridWindow(Z, 0, N - 1), vals)


def test_profile_examples():
    assert kiguradze_profile(concave_increasing(), 2).m == 1
    dec = GridFn.from_function(Z, 0, 9, lambda t: 1 / (1 + t))
    assert kiguradze_profile(dec, 1).m == 0
    cubic = GridFn.from_function(Z, 0, 20, lambda t: 100 + 50 * t + 20 * t**2 / 2 - 0.01 * t**3 / 6)
    p = kiguradze_profile(cubic, 3)
    assert p.m == 2 and p.s_index == 0 and p.signs == (1, 1, 1)


def test_profile_finds_start_of_pattern():
    # the first difference is negative up to t = 5, so the pattern m = 2 starts at 6
    f = GridFn.from_function(Z, 0, 40, lambda t: 1000 + (t - 5.5) ** 2 - 1e-3 * t**3)
    p = kiguradze_profile(f, 3)
    assert p.m == 2 and p.s_index == 6
    hump = GridFn.from_function(Z, 0, 40, lambda t: 1000 - (t - 10) ** 2)
    with pytest.raises(PatternNotFound):
        kiguradze_profile(hump, 2)


def test_profile_errors():
    with pytest.raises(WindowTooShort):
        kiguradze_profile(concave_increasing(7), 2)
    neg = GridFn.from_function(Z, 0, 20, lambda t: t - 5.0)
    with pytest.raises(HypothesisViolated):
        kiguradze_profile(neg, 1)
    convex = GridFn.from_function(Z, 0, 20, lambda t: 1.0 + t**2)
    with pytest.raises(HypothesisViolated):
        kiguradze_profile(convex, 2)
    linear = GridFn.from_function(Z, 0, 20, lambda t: 1.0 + t)
    with pytest.raises(HypothesisViolated):
        kiguradze_profile(linear, 2)


def test_pattern_not_found_on_short_tail():
    # n = 3 with D^3 < 0: D^2 turns negative only on the last few points
    N = 40
    d3 = -np.ones(N - 3)
    d2 = 33.5 + np.concatenate([[0.0], np.cumsum(d3)])
    d1 = 1e4 + np.concatenate([[0.0], np.cumsum(d2)])
    f = 1e6 + np.concatenate([[0.0], np.cumsum(d1)])
    with pytest.raises(PatternNotFound):
        kiguradze_profile(GridFn(GridWindow(Z, 0, N - 1), f), 3)


def test_local_scale_tolerance_keeps_tiny_but_accurate_values():
    # |D^2| is ~1e-14 of max f but far above rounding noise
    f = GridFn.from_function(Geometric(2, 1), 0, 40, lambda t: t ** 0.5)
    p = kiguradze_profile(f, 2)
    assert p.m == 1 and p.s_index == 0
    sc = local_scales(f, 2)
    assert len(sc[2]) == len(f) - 2


def test_exact_classification():
    rng = np.random.default_rng(3)
    f = construct_kiguradze_function(Uniform(Fraction(1, 2), 0), 0, 30, 4, 1, rng, exact=True)
    assert f.exact
    rows = forward_differences(f.values, f.t, 4)
    assert all(v < 0 for v in rows[4])
    p = kiguradze_profile(f, 4)
    assert p.m == 1 and p.s_index == 0


def test_philos_examples():
    const = GridFn.from_function(Z, 0, 20, lambda t: 3.0)
    prof = KiguradzeProfile(n=2, m=1, s_index=0, signs=(1, 1), tail_length=19)
    r = verify_philos(const, 2, prof)
    assert r.min_slack == 3.0 and r.passed

    f = concave_increasing()
    r = verify_philos(f, 2, kiguradze_profile(f, 2))
    assert r.min_slack >= 0

    h = 0.01
    ts = Uniform(h, 0)
    root = GridFn(GridWindow(ts, 100, 40000), np.sqrt(ts.points(100, 40000)))
    r = verify_philos(root, 2, kiguradze_profile(root, 2))
    assert r.min_slack >= -1e-6


def test_philos_fails_for_key_number_zero():
    # f = 2^{-t} on Z with n = 3 has m = 0, and f(t) < h_2(t, s) D^2 f(t) from t = s + 4 on
    f = GridFn.from_function(Z, 0, 30, lambda t: 2.0 ** -t)
    p = kiguradze_profile(f, 3)
    assert p.m == 0 and p.s_index == 0
    slack = philos_slack(f, 3, 0)
    assert np.all(slack[:4] >= 0) and np.all(slack[4:] < 0)
    with pytest.raises(HypothesisViolated):
        verify_philos(f, 3, p)


def test_philos_lambda_examples():
    f = construct_geometric_tail(3, 2, 40)
    p = kiguradze_profile(f, 3)
    r, worst = verify_philos_lambda(f, 3, 1e-9, 0, p)
    assert r == p.s_index and worst >= 0

    g = construct_geometric_tail(3, 0, 60, limit=Fraction(2))
    p = kiguradze_profile(g, 3)
    r, _ = verify_philos_lambda(g, 3, 0.5, 0, p)
    assert p.s_index <= r < len(g) - 2

    z = construct_geometric_tail(3, 0, 60, limit=Fraction(0), exact=False)
    with pytest.raises(TailVanishes):
        verify_philos_lambda(z, 3, 0.5, 0, kiguradze_profile(z, 3))
    with pytest.raises(ValueError):
        verify_philos_lambda(g, 3, 1.5, 0, p)


def test_philos_lambda_not_found():
    # f slowly approaches a small limit while h_2 grows: the inequality fails at the end
    g = construct_geometric_tail(3, 0, 20, rate=Fraction(9, 10), limit=Fraction(1, 100), amplitude=Fraction(1))
    p = kiguradze_profile(g, 3)
    with pytest.raises(NotFoundInWindow):
        verify_philos_lambda(g, 3, 0.99, 0, p)


def test_decay_examples():
    f = concave_increasing()
    assert decay_check(f, 2, kiguradze_profile(f, 2)) == {}
    cubic = GridFn.from_function(Z, 0, 20, lambda t: 100 + 50 * t + 10 * t**2 - 0.01 * t**3 / 6)
    assert decay_check(cubic, 3, kiguradze_profile(cubic, 3)) == {}
    small, big = (construct_geometric_tail(3, 0, N, rate=Fraction(1, 4)) for N in (40, 80))
    a = decay_check(small, 3, kiguradze_profile(small, 3))
    b = decay_check(big, 3, kiguradze_profile(big, 3))
    assert set(a) == {1, 2}
    assert all(b[k] <= a[k] / 2 for k in a)


def test_geometric_tail_derivatives_are_exact():
    f = construct_geometric_tail(4, 1, 20, rate=Fraction(1, 3), amplitude=Fraction(2))
    rows = forward_differences(f.values, f.t, 4)
    assert rows[4] == [-2 * Fraction(1, 3) ** i for i in range(16)]
    assert kiguradze_profile(f, 4).m == 1


def test_constructor_rejects_bad_key_number():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        construct_kiguradze_function(Z, 0, 20, 3, 1, rng)
    with pytest.raises(ValueError):
        construct_geometric_tail(2, 2, 10)


def test_expected_signs():
    assert expected_signs(4, 1) == (1, 1, -1, 1)
    assert expected_signs(5, 2) == (1, 1, 1, -1, 1)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1), st.booleans())
def test_constructed_key_number_is_recovered(n, seed, geometric):
    rng = np.random.default_rng(seed)
    m = int(rng.choice([m for m in range(n) if (n - m) % 2 == 1]))
    ts = Geometric(float(rng.uniform(1.1, 2)), 1.0) if geometric else Uniform(float(rng.uniform(0.1, 2)), 0.0)
    N = int(rng.integers(4 * n, 81))
    f = construct_kiguradze_function(ts, 0, N, n, m, rng)
    p = kiguradze_profile(f, n)
    assert (p.m, p.s_index) == (m, 0)
    if n >= 2 and m >= 1:
        assert verify_philos(f, n, p).passed


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([(2, 1), (3, 0), (3, 2), (4, 1), (4, 3)]), st.integers(0, 1000))
def test_lambda_index_monotone(nm, seed):
    n, m = nm
    rng = np.random.default_rng(seed)
    f = construct_geometric_tail(n, m, 50, rate=Fraction(int(rng.integers(2, 8)), 10),
                                 amplitude=Fraction(int(rng.integers(1, 20)), 4),
                                 limit=Fraction(int(rng.integers(1, 10)), 10))
    p = kiguradze_profile(f, n)
    rs = [verify_philos_lambda(f, n, lam, 0, p)[0] for lam in (0.1, 0.5, 0.9)]
    assert rs == sorted(rs)
