"""Acceptance suite: every criterion runs at its stated size, tolerance and time budget.

Each test prints one PASS/FAIL line (also collected into the terminal summary).
"""
import math
import time
from fractions import Fraction

import numpy as np
import pytest

import acceptance_log
from tsosc.calculus import GridFn
from tsosc.classify import (
    construct_geometric_tail,
    construct_kiguradze_function,
    decay_check,
    kiguradze_profile,
    philos_slack,
    verify_philos,
    verify_philos_lambda,
)
from tsosc.errors import NotFoundInWindow
from tsosc.monomials import check_lemma_inequalities, first_arg_table, limit_ratio_check, q_gamma, taylor_parts
from tsosc.oscillation import (
    CriterionBundle,
    conclude,
    continuous_crossover,
    criterion_exponential,
    criterion_windows,
    divergence_check,
    example_spec,
    threshold_closed_form,
)
from tsosc.scale import Explicit, Geometric, GridWindow, Uniform
from tsosc.simulate import InitialData, sign_changes, step_ivp

SEED = 42


def run_criterion(number, title, budget, body):
    """Time ``body`` (returning ``(ok, detail)``), log one line and assert."""
    t0 = time.perf_counter()
    ok, detail = body()
    elapsed = time.perf_counter() - t0
    in_time = elapsed < budget
    passed = bool(ok) and in_time
    timing = f"{elapsed:.3f}s of {budget}s" + ("" if in_time else " (over budget)")
    line = f"{'PASS' if passed else 'FAIL'}  criterion {number:>2}: {title}: {detail} [{timing}]"
    acceptance_log.LINES[number] = line
    print(line)
    assert passed, line


# -- 1 ---------------------------------------------------------------------------

def test_criterion_01_integer_monomials_match_falling_factorials():
    def body():
        Z = Uniform(1, 0)
        K, T = 6, 50
        exact_bad = 0
        worst = 0.0
        for s in range(T + 1):
            ex = first_arg_table(Z, K, s, s, T, exact=True)
            fl = first_arg_table(Z, K, s, s, T)
            for k in range(K + 1):
                for t in range(s, T + 1):
                    want = Fraction(math.prod(t - s - i for i in range(k)), math.factorial(k))
                    exact_bad += ex[k, t - s] != want
                    if want:
                        worst = max(worst, abs(fl[k, t - s] - float(want)) / abs(float(want)))
                    else:
                        worst = max(worst, abs(fl[k, t - s]))
        return exact_bad == 0 and worst <= 1e-9, f"exact mismatches {exact_bad}, float max rel err {worst:.1e}"

    run_criterion(1, "integer-scale monomials vs falling factorials (k<=6, s<=t<=50)", 1.0, body)


# -- 2 ---------------------------------------------------------------------------

def test_criterion_02_geometric_closed_form():
    def body():
        worst = 0.0
        for q in (1.5, 2.0, 3.0):
            ts = Geometric(q, 1.0)
            pts = ts.points(0, 59)
            for i_s in range(60):
                tab = first_arg_table(ts, 5, i_s, 0, 59)
                s = pts[i_s]
                for k in range(6):
                    num = np.prod([pts - q**i * s for i in range(k)], axis=0) if k else np.ones(60)
                    den = math.prod(sum(q**j for j in range(i + 1)) for i in range(k))
                    want = num / den
                    # exact zeros at t = s, sigma(s), ..., sigma^{k-1}(s)
                    nz = ~((np.arange(60) >= i_s) & (np.arange(60) < i_s + k))
                    rel = np.abs(tab[k][nz] - want[nz]) / np.abs(want[nz])
                    worst = max(worst, float(rel.max(initial=0.0)))
                    if np.any(tab[k][~nz] != 0):
                        worst = math.inf
        # the product's normalisation is the q-factorial q_gamma(q, k + 1)
        assert all(q_gamma(q, k + 1) == pytest.approx(math.prod(sum(q**j for j in range(i + 1)) for i in range(k)))
                   for q in (1.5, 2, 3) for k in range(6))
        return worst <= 1e-9, f"max rel err {worst:.1e} over q in {{1.5, 2, 3}}, k<=5, 60x60 (s, t) pairs"

    run_criterion(2, "geometric recursion vs q-product closed form", 1.0, body)


# -- 3 ---------------------------------------------------------------------------

def test_criterion_03_taylor_identity():
    def body():
        rng = np.random.default_rng(SEED)
        exact_bad = 0
        worst_float = 0.0
        points = 0
        for _ in range(100):
            N = int(rng.integers(10, 101))
            n = int(rng.integers(1, 6))
            i_s = int(rng.integers(0, N - n + 1))
            # exact rational path: the identity must hold with no error at all
            gaps = rng.integers(1, 9, N - 1)
            pts = [Fraction(0)]
            for g in gaps:
                pts.append(pts[-1] + Fraction(int(g), 4))
            vals = np.array([Fraction(int(v), 16) for v in rng.integers(-32, 33, N)], dtype=object)
            f = GridFn(GridWindow(Explicit(tuple(pts)), 0, N - 1), vals)
            t, sp, rem = taylor_parts(f, n, pts[i_s])
            exact_bad += int(np.sum(sp + rem != f.values[: len(t)]))
            points += len(t)
            # float path on a real-valued scale; error relative to the largest term summed
            fpts = np.concatenate([[0.0], np.cumsum(rng.uniform(0.1, 2.0, N - 1))])
            g = GridFn(GridWindow(Explicit(tuple(fpts)), 0, N - 1), rng.uniform(-1, 1, N))
            t, sp, rem = taylor_parts(g, n, fpts[i_s])
            fv = g.values[: len(t)]
            size = np.maximum.reduce([np.abs(fv), np.abs(sp), np.abs(rem)])
            worst_float = max(worst_float, float(np.max(np.abs(sp + rem - fv) / size)))
        ok = exact_bad == 0 and worst_float <= 1e-10
        return ok, f"{points} points, exact mismatches {exact_bad}, float max rel err {worst_float:.1e}"

    run_criterion(3, "Taylor identity on 100 random explicit scales (N<=100, n<=5)", 5.0, body)


# -- 4 ---------------------------------------------------------------------------

def _random_scale(rng):
    kind = rng.integers(3)
    if kind == 0:
        return Uniform(float(rng.uniform(0.1, 2)), float(rng.uniform(-5, 5)))
    if kind == 1:
        return Geometric(float(rng.uniform(1.1, 3)), float(rng.uniform(0.5, 2)))
    return Explicit(tuple(np.concatenate([[0.0], np.cumsum(rng.uniform(0.05, 3, int(rng.integers(10, 60))))])))


def test_criterion_04_lemma_inequalities():
    def body():
        rng = np.random.default_rng(SEED)
        worst = math.inf
        failed = 0
        checked = 0
        for _ in range(1000):
            ts = _random_scale(rng)
            k, l = int(rng.integers(0, 5)), int(rng.integers(0, 5))
            top = ts.max_index if ts.max_index is not None else 40
            i_s = int(rng.integers(0, top))
            i_t = int(rng.integers(i_s, min(top, i_s + 40) + 1))
            rep = check_lemma_inequalities(ts, k, l, ts.point(i_s), (i_s, i_t), tol=1e-12)
            failed += not all(r.passed for r in rep.values())
            worst = min(worst, min(r.min_normalized for r in rep.values()))
            checked += sum(r.checked for r in rep.values())
        return failed == 0, f"1000 instances, {checked} inequalities, {failed} failing, worst normalised slack {worst:.1e}"

    run_criterion(4, "monomial inequality suite (swap, product, convolution, g>=h)", 10.0, body)


# -- 5 ---------------------------------------------------------------------------

def _philos_instance(rng):
    n = int(rng.integers(1, 6))
    m = int(rng.choice([m for m in range(n) if (n - m) % 2 == 1]))
    if rng.random() < 0.5:
        ts = Uniform(float(rng.uniform(0.1, 2)), 0.0)
        N = int(rng.integers(4 * n, 301))
    else:
        ts = Geometric(float(rng.uniform(1.1, 2)), 1.0)
        N = int(rng.integers(max(4 * n, 12), 101))
    return n, m, ts, construct_kiguradze_function(ts, 0, N, n, m, rng)


@pytest.mark.xfail(strict=True, reason="the inequality is false for key number m = 0 (e.g. f = 2^-t, n = 3); "
                                        "see the decisions ledger")
def test_criterion_05_philos_inequality():
    def body():
        rng = np.random.default_rng(SEED)
        recovered = 0
        fails = {}
        total = {}
        for _ in range(1000):
            n, m, ts, f = _philos_instance(rng)
            prof = kiguradze_profile(f, n)
            recovered += (prof.m, prof.s_index) == (m, 0)
            if n >= 2 and prof.m >= 1:
                bad = not verify_philos(f, n, prof).passed
            else:
                # the checker refuses m = 0; measure the raw inequality instead
                slack = philos_slack(f, n, prof.s_index)
                vals = np.asarray(f.values[prof.s_index : prof.s_index + len(slack)], dtype=float)
                bad = bool(np.any(slack < -1e-10 * np.maximum(1.0, np.abs(vals))))
            key = (ts.kind, "m=0" if m == 0 else "m>=1")
            total[key] = total.get(key, 0) + 1
            fails[key] = fails.get(key, 0) + bad
        breakdown = ", ".join(f"{k[0]} {k[1]}: {fails[k]}/{total[k]} fail" for k in sorted(total))
        ok = recovered == 1000 and sum(fails.values()) == 0
        return ok, f"m recovered {recovered}/1000; Philos slack {breakdown}"

    run_criterion(5, "Kiguradze recovery and Philos inequality on 1000 constructed functions", 30.0, body)


# -- 6 ---------------------------------------------------------------------------

def test_criterion_06_lambda_inequality():
    def body():
        rng = np.random.default_rng(SEED)
        good = 0
        for _ in range(100):
            n = int(rng.integers(1, 6))
            m = int(rng.choice([m for m in range(n) if (n - m) % 2 == 1]))
            # the window must reach the regime where rate^t beats h_{n-1}(t, t0) ~ t^(n-1)
            f = construct_geometric_tail(
                n, m, int(rng.integers(40, 101)),
                rate=Fraction(int(rng.integers(1, 7)), 10),
                amplitude=Fraction(int(rng.integers(1, 41)), 4),
                limit=Fraction(int(rng.integers(1, 21)), 4),
                start_values=[Fraction(int(v), 4) for v in rng.integers(1, 21, n)],
            )
            prof = kiguradze_profile(f, n)
            try:
                rs = [verify_philos_lambda(f, n, lam, f.t[0], prof)[0] for lam in (0.1, 0.5, 0.9)]
            except NotFoundInWindow:
                continue
            good += rs == sorted(rs)
        return good == 100, f"{good}/100 instances with finite, nondecreasing r over lambda in {{0.1, 0.5, 0.9}}"

    run_criterion(6, "lambda version of the Philos inequality", 10.0, body)


# -- 7 ---------------------------------------------------------------------------

def test_criterion_07_qdifference_example():
    def body():
        thr = threshold_closed_form("q-difference", {"q": 2, "n": 2, "b0": 1, "beta0": 1})
        spec = example_spec("q-difference", {"q": 2, "n": 2, "b0": 1, "beta0": 1})
        windows = criterion_windows(spec, points=41)  # t up to 2^40
        lo = windows[0]
        late = lo.t >= 2.0**20
        dev = float(np.max(np.abs(lo.trace[late] / 0.5 - 1)))
        bundle = CriterionBundle(criterion_exponential(spec, points=41), windows)
        verdict = conclude(spec, bundle, divergence_check(spec, points=41)).verdict
        tr = step_ivp(spec, InitialData.from_expression(spec, "1"), 200)
        changes = len(tr.sign_changes)
        ok = (thr.lhs == 0.5 and thr.rhs == 0.25 and thr.satisfied and late.sum() == 21 and dev <= 0.05
              and lo.t[-1] == 2.0**40 and verdict == "AllSolutionsOscillate" and changes >= 20)
        return ok, (f"lhs {thr.lhs} > rhs {thr.rhs}; max deviation from 0.5 for t>=2^20 {dev:.1e}; "
                    f"{verdict}; {changes} sign changes in 200 points")

    run_criterion(7, "q-difference example (q=2, n=2, beta0=1, b0=1)", 2.0, body)


# -- 8 ---------------------------------------------------------------------------

def test_criterion_08_difference_example():
    def body():
        thr = threshold_closed_form("difference")
        spec = example_spec("difference")
        tr = step_ivp(spec, InitialData.from_expression(spec, "1"), 5000)
        x = tr.x.restrict(spec.t0_index, spec.scale.index_of(5000.0))
        changes = sign_changes(x)[0]
        weak_params = {"b0": 0.4}
        weak_thr = threshold_closed_form("difference", weak_params)
        weak = example_spec("difference", weak_params)
        bundle = CriterionBundle(criterion_exponential(weak, points=5000), criterion_windows(weak, points=5000))
        verdict = conclude(weak, bundle, divergence_check(weak, points=5000)).verdict
        ok = (thr.lhs == 0.5 and thr.rhs == 0.25 and thr.satisfied and changes >= 10
              and not weak_thr.satisfied and math.isclose(weak_thr.lhs, 0.2) and verdict == "Inconclusive")
        return ok, (f"lhs {thr.lhs} > rhs {thr.rhs}; {changes} sign changes up to t=5000; "
                    f"b0=0.4: lhs {weak_thr.lhs:.3g} < rhs {weak_thr.rhs}, {verdict}")

    run_criterion(8, "difference example (n=2, a0=0.5, alpha0=beta0=1, p=1)", 2.0, body)


# -- 9 ---------------------------------------------------------------------------

def test_criterion_09_continuous_crossover():
    def body():
        beta0 = continuous_crossover(4)
        details = threshold_closed_form("continuous", {"n": 4}).details
        ok = abs(beta0 - 1.63314) <= 5e-5 and details["beta0_crossover"] == beta0
        return ok, f"crossover exp(4/(3e)) = {beta0:.6f}"

    run_criterion(9, "continuous example comparison point for n=4", 0.1, body)


# -- 10 --------------------------------------------------------------------------

def test_criterion_10_limit_ratios():
    def body():
        parts = []
        ok = True
        for n in range(5):
            ratio, limit = limit_ratio_check(2, n)
            dev = abs(ratio / limit - 1)
            ok &= dev <= 0.02 and limit == pytest.approx(1 / q_gamma(2, n + 1))
            parts.append(f"n={n}: {ratio:.6f} vs {limit:.6f}")
        return ok, "h_n(2^20, 1)/2^(20n) against 1/q-factorial: " + "; ".join(parts)

    run_criterion(10, "limit ratios on 2^Z", 1.0, body)


# -- 11 --------------------------------------------------------------------------

def test_criterion_11_decay():
    def body():
        rng = np.random.default_rng(SEED)
        pairs = [(3, 0), (4, 1), (5, 0), (5, 2)]
        good = 0
        worst = 0.0
        for _ in range(100):
            n, m = pairs[rng.integers(len(pairs))]
            kw = dict(rate=Fraction(int(rng.integers(1, 9)), 10),
                      amplitude=Fraction(int(rng.integers(1, 41)), 4),
                      limit=Fraction(int(rng.integers(0, 21)), 4))
            N = int(rng.integers(20, 61))
            small, big = (construct_geometric_tail(n, m, L, **kw) for L in (N, 2 * N))
            a = decay_check(small, n, kiguradze_profile(small, n))
            b = decay_check(big, n, kiguradze_profile(big, n))
            ratios = [b[k] / a[k] for k in range(m + 1, n)]
            worst = max(worst, max(ratios))
            good += set(a) == set(range(m + 1, n)) and all(r <= 0.5 for r in ratios)
        return good == 100, f"{good}/100 instances shrink by >=2x on doubling; worst ratio {worst:.2e}"

    run_criterion(11, "decay of intermediate deltas (m <= n-2)", 10.0, body)
