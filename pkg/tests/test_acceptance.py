"""Acceptance suite: one test per criterion, at the stated tolerances."""

import math
import time
from collections import Counter

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from strategies import small_reps

from radixasym import exact as ex
from radixasym import fixtures as fx
from radixasym.asym import build_expansion, expansion_eval, phi_eval, phi_grid
from radixasym.dilation import cascade_solve, estimate_exponent, evaluate_columns, holder_estimate
from radixasym.fourier import FourierEngine, fourier_trapezoid
from radixasym.linrep import (DigitWord, eval_range, partial_sum_direct, partial_sum_via_series,
                              partial_sums, q_matrix, sigma_direct, sigma_recursive)
from radixasym.spectral import (Eigenvalue, JordanChain, _WordSearch, decompose_C, jordan_decompose,
                                jordan_from_basis, jsr_bounds)

C0 = "-0.36276483219909523733941579131627817954357682261599"
C1 = ("0.00328444028368975642383395704527876596759317794466551",
      "0.00199132072044919779610043930356670834266095959747")
C10 = ("0.00050210083984953064910235351056678436057811735044",
       "0.00010608705990659151346295572715633259834904284986")


def digits_of_agreement(got, ref):
    with mpmath.workdps(80):
        err = abs(mpmath.mpc(got) - ref)
        return float("inf") if err == 0 else float(-mpmath.log10(err / abs(ref)))


# 1
def test_c01_sequence_evaluation(dicho):
    start = time.perf_counter()
    u = eval_range(dicho, 2 ** 14)
    elapsed = time.perf_counter() - start
    assert u == fx.dichopile_oracle(2 ** 14)
    assert elapsed < 10


# 2
def test_c02_jsr_growth_law(dicho):
    search = _WordSearch(dicho, "1", 2 ** 24)
    for T in range(1, 13):
        assert jsr_bounds(dicho, T, "1", search=search).max_norm == T + 1


# 3
def test_c03_jordan_structure(dicho):
    Q = q_matrix(dicho)
    jd = jordan_decompose(Q)
    assert Counter(ex.format_rational(e.value) for e in jd.eigenvalues) == \
        Counter(["2", "2", "1", "1", "-1", "0"])
    fixed = jordan_from_basis(Q, dicho.meta["jordan_basis"])
    assert [c.size for c in fixed.chains] == [2, 2, 1, 1]
    assert [int(c.eigenvalue.value) for c in fixed.chains] == [2, 1, -1, 0]
    assert ex.mat_mul(Q, fixed.P) == ex.mat_mul(fixed.P, fixed.Lambda)
    gamma = decompose_C(fixed, dicho.C)
    assert [int(g) for g in gamma if g] == [1, 1, 1, -2, -1]
    assert ex.mat_vec(fixed.P, gamma) == dicho.C


# 4
def g1(x):
    return ex.ZERO if x <= ex.mpq(1, 2) else (x - ex.mpq(1, 2)) / 3


def g6(x):
    if x == 0:
        return ex.ZERO
    if x >= ex.mpq(1, 2):
        return x / 3 + ex.mpq(1, 2)
    k = 1
    while x < ex.mpq(1, 2 ** (k + 1)):
        k += 1
    return (k + 2) * x / 3 + ex.mpq(1, 3 * 2 ** k)


def test_c04_cascade_closed_forms(dicho):
    jd = jordan_from_basis(q_matrix(dicho), dicho.meta["jordan_basis"])
    sol = cascade_solve(dicho, jd.chains[0], 10)
    for i in range(2 ** 10 + 1):
        x = ex.mpq(i, 2 ** 10)
        g = evaluate_columns(sol, x)[1]
        assert g[0] == g1(x), x
        assert g[5] == g6(x), x
    assert evaluate_columns(sol, ex.ONE)[1][4] == ex.mpq(-4, 3)


# 5
def test_c05_expansion_identity(dicho, dicho_exp):
    Ns = sorted({round(2 ** (8 + j / 4)) for j in range(41)})
    f = fx.dichopile_costs(Ns[-1])
    norm = []
    for N in Ns:
        pred = expansion_eval(dicho_exp, N, depth=14).real
        norm.append(abs(f[N] - pred) / N ** 0.9)
    xs = [math.log(N) for N in Ns]
    ys = [math.log(v) for v in norm]
    mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
    slope = sum((a - mx) * (b - my) for a, b in zip(xs, ys)) / sum((a - mx) ** 2 for a in xs)
    third = len(norm) // 3
    assert slope <= 0
    assert max(norm[-third:]) <= max(norm[:third])
    assert max(norm) < 1


# 6
def test_c06_phi_maximum(dicho_phi):
    top = max(v.real for _, _, v in phi_grid(dicho_phi, 12))
    assert abs(top + 1 / 3) < 2e-3


# 7
def test_c07_fourier_newton(dicho_exp, dicho_phi):
    start = time.perf_counter()
    eng = FourierEngine(dicho_exp)
    got = {k: eng.coefficient(dicho_phi, k, 50).value for k in (0, 1, 10)}
    elapsed = time.perf_counter() - start
    with mpmath.workdps(80):
        refs = {0: mpmath.mpf(C0), 1: mpmath.mpc(*C1), 10: mpmath.mpc(*C10)}
    for k, ref in refs.items():
        assert digits_of_agreement(got[k], ref) >= 30, k
    assert elapsed < 60


# 8
def test_c08_fourier_trapezoid(dicho_phi, dicho_engine):
    exact = dicho_engine.coefficient(dicho_phi, 0, 30).value
    t10 = fourier_trapezoid(dicho_phi, 0, 10).value
    t12 = fourier_trapezoid(dicho_phi, 0, 12).value
    # one unit in the 10th printed digit
    assert abs(t10.real - (-0.3626476334)) < 1e-10
    assert abs(t12.real - (-0.3627354935)) < 1e-10
    ratio = abs(t10 - exact) / abs(t12 - exact)
    alpha = dicho_phi.expansion.holder_constant(0, 1).alpha
    assert ratio >= 4 ** alpha
    assert ratio >= 4 ** 0.9


# 9
def test_c09_error_term_sharpness():
    rep = fx.load_fixture("triangular_tiling")
    for K in range(21):
        v = sigma_recursive(rep, None, 2 * K + 2, DigitWord(fx.tiling_point(K), 2))
        assert abs(math.hypot(v[0], v[1]) - (K + 1)) < 1e-9


# 10
def test_c10_oracle_equivalence():
    seen = [0]

    @settings(max_examples=110, deadline=None, database=None)
    @given(small_reps(), st.data())
    def check(rep, data):
        seen[0] += 1
        B = rep.radix
        for K in range(7):
            js = data.draw(st.lists(st.integers(0, B ** K), min_size=1, max_size=6))
            for j in js + [0, B ** K]:
                x = ex.mpq(j, B ** K)
                assert sigma_recursive(rep, None, K, x) == sigma_direct(rep, None, K, x)
        sums = partial_sums(rep, 500)
        for N in range(501):
            assert partial_sum_via_series(rep, N) == sums[N]
        for N in data.draw(st.lists(st.integers(0, 500), min_size=3, max_size=8)):
            assert partial_sum_direct(rep, N) == sums[N]

    check()
    assert seen[0] >= 100


# 11
def test_c11_rudin_shapiro(rs4_exp):
    rs = fx.load_fixture("rudin_shapiro")
    u = eval_range(rs, 2 ** 20)
    s, worst = 0, 0.0
    for N, v in enumerate(u):
        s += v
        if N:
            worst = max(worst, abs(s) / math.sqrt(N))
    assert worst <= math.sqrt(6)
    term = next(t for t in rs4_exp.terms if t.constant is None)
    for i in range(51):
        a = i / 100
        b = math.log(4 ** a + 2, 4)
        lhs = 2 ** a * phi_eval(term, a, 12).value.real + 2 ** b * phi_eval(term, b, 12).value.real
        assert abs(lhs - 4) < 1e-2, a


# 12
def test_c12_biased_coin():
    coin = fx.load_fixture("biased_coin")
    sol = cascade_solve(coin, JordanChain(Eigenvalue(ex.ONE), [[ex.ONE]]), 12)
    vals = [evaluate_columns(sol, x)[0][0] for x in sol.points()]
    assert all(a <= b for a, b in zip(vals, vals[1:]))
    assert vals[0] == 0 and vals[-1] == 1 and ex.is_exact(vals[-1])
    h = holder_estimate(sol, 0.3)
    assert h.passed and math.isfinite(h.constant)
    assert abs(estimate_exponent(sol) - 0.322) < 0.05
