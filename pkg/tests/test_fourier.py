import mpmath
import pytest
import sympy

from radixasym import exact as ex
from radixasym import fixtures as fx
from radixasym.asym import build_expansion, phi_eval
from radixasym.dilation import cascade_solve
from radixasym.errors import (InsufficientTermsError, MellinDerivativeError, UnsupportedError,
                              ValidationError)
from radixasym.fourier import (FourierEngine, MomentTable, Piece, detect_closed_form,
                               fourier_closed_form, fourier_coefficients, fourier_trapezoid,
                               mellin_eval, moments, newton_differences, truncated_series,
                               verify_closed_form)
from radixasym.spectral import Eigenvalue, JordanChain


@pytest.fixture(scope="module")
def sod_exp():
    return build_expansion(fx.load_fixture("sum_of_digits"), depth=10)


def sod_oracle(k):
    """Fourier coefficients of the periodic part of the binary digit sum (classical closed forms)."""
    if k == 0:
        return mpmath.log(mpmath.pi, 2) / 2 - 1 / (2 * mpmath.log(2)) - mpmath.mpf(1) / 4
    chi = 2j * mpmath.pi * k / mpmath.log(2)
    return -mpmath.zeta(chi) / (mpmath.log(2) * chi * (1 + chi))


def test_coin_moments():
    coin = fx.load_fixture("biased_coin")
    t = moments(coin, JordanChain(Eigenvalue(ex.ONE), [[ex.ONE]]), 3)
    # int F = 1 - mean, and the digit measure has mean 4/5
    assert t.full(1)[0][0] == ex.mpq(1, 5)
    assert all(v == [0] for v in t.residual(3))


def test_dicho_moment_residual(dicho_exp):
    table = MomentTable.for_solution(dicho_exp.solutions[0])
    for ell in (1, 2, 5, 9):
        assert all(not any(v) for v in table.residual(ell))


def test_polynomial_piece_against_sympy(dicho_engine):
    # column 0 of the chain at 2 is x on [1/2, 1]
    assert dicho_engine.closed[(0, 0)] == [Piece(ex.mpq(1, 2), ex.ONE, [0, 1])]
    x = sympy.Symbol("x")
    table = dicho_engine.table(0)
    for ell in range(1, 8):
        want = sympy.integrate(x ** (ell - 1) * x, (x, sympy.Rational(1, 2), 1))
        assert sympy.Rational(str(table.mellin_integer(0, ell))) == want


def test_mellin_integer_vs_quadrature(dicho_exp, dicho_engine):
    sol = dicho_exp.solutions[0]
    table = dicho_engine.table(0)
    K = sol.depth
    L = dicho_exp.rep.L
    pts = [(ex.mpq(j, 2 ** K), ex.dot(L, sol.columns_at(j, K)[1] if j < 2 ** K else sol.V[1]))
           for j in range(2 ** (K - 1), 2 ** K + 1)]
    for ell in (1, 3):
        h = 1.0 / 2 ** K
        s = sum(float(v) * float(x) ** (ell - 1) for x, v in pts) * h
        s -= (float(pts[0][1]) * 0.5 ** (ell - 1) + float(pts[-1][1])) * h / 2
        assert s == pytest.approx(float(table.mellin_integer(1, ell)), abs=1e-3)


def test_newton_exact_at_integers(dicho_engine):
    nc = dicho_engine.newton_coefficients(0, 1)
    table = dicho_engine.table(0)
    for ell in (1, 2, 4):
        mv = mellin_eval(nc, ell, digits=30)
        assert abs(mv.value - mpmath.mpf(float(table.mellin_integer(1, ell)))) < 1e-14
    d = newton_differences(table, 1, 5)
    assert d.delta(1) == table.mellin_integer(1, 2) - table.mellin_integer(1, 1)


def test_insufficient_terms(dicho_engine):
    nc = dicho_engine.newton_coefficients(0, 1)
    with pytest.raises(InsufficientTermsError):
        mellin_eval(nc, mpmath.mpc(-1, 40), digits=30, max_terms=5)


def test_sum_of_digits_fourier(sod_exp):
    term = next(t for t in sod_exp.terms if t.constant is None)
    eng = FourierEngine(sod_exp)
    for c in fourier_coefficients(term, range(0, 3), digits=30, engine=eng):
        with mpmath.workdps(40):
            assert abs(c.value - sod_oracle(c.k)) < mpmath.mpf(10) ** -29, c.k


def test_closed_form_detection():
    f = lambda x: x * x if x < ex.mpq(3, 4) else 2 * x - ex.mpq(15, 16)
    pcs = detect_closed_form(f, 2, 6)
    assert len(pcs) == 2 and pcs[0].coeffs == [0, 0, 1] and pcs[1].coeffs == [ex.mpq(-15, 16), 2]
    assert verify_closed_form(pcs, f, 2, 8)
    assert detect_closed_form(lambda x: x ** 5, 2, 6) is None


def test_closed_form_integral():
    # lambda = 2, k = 0, f = x on [1/2, 1]: (1/ln 2) int x^-2 * x dx = 1
    v = fourier_closed_form([Piece(ex.mpq(1, 2), ex.ONE, [0, 1])], ex.mpq(2), 0, 0, 2, digits=30)
    assert abs(v - 1) < 1e-28
    # p = 1: (1/ln 2) int x^-1 (-log2 x) dx = 1/2
    v = fourier_closed_form([Piece(ex.mpq(1, 2), ex.ONE, [0, 1])], ex.mpq(2), 1, 0, 2, digits=30)
    assert abs(v - mpmath.mpf(1) / 2) < 1e-28
    with mpmath.workdps(40):
        lnB = mpmath.log(3)
        sig = mpmath.log(2) / lnB + 2j * mpmath.pi / lnB
        want = mpmath.quad(lambda x: x ** (-sig - 1) * (1 + x) ** 2, [mpmath.mpf(1) / 3, 1]) / lnB
    got = fourier_closed_form([Piece(ex.mpq(1, 3), ex.ONE, [1, 2, 1])], ex.mpq(2), 0, 1, 3, digits=30)
    assert abs(got - want) < 1e-25


def test_derivative_primitive_needs_closed_form(dicho_exp, dicho_phi):
    eng = FourierEngine(dicho_exp, detect=False)
    if any(p.p for p in dicho_phi.primitives):
        with pytest.raises(MellinDerivativeError):
            eng.coefficient(dicho_phi, 0, 20)


def test_user_closed_form(dicho_exp, dicho_phi, dicho_engine):
    good = FourierEngine(dicho_exp, closed_forms={"0:0": [["1/2", "1", ["0", "1"]]]}, detect=False)
    a = good.coefficient(dicho_phi, 1, 20).value
    b = dicho_engine.coefficient(dicho_phi, 1, 20).value
    assert abs(a - b) < 1e-18
    with pytest.raises(ValidationError):
        FourierEngine(dicho_exp, closed_forms={"0:0": [["1/2", "1", ["0", "2"]]]})


def test_truncated_series(dicho_engine, dicho_phi):
    cs = [dicho_engine.coefficient(dicho_phi, k, 20) for k in range(0, 11)]
    for t in (0.2, 0.55):
        approx = truncated_series(cs, t)
        assert abs(approx.imag) < 1e-15
        assert abs(approx.real - phi_eval(dicho_phi, t, 14).value.real) < 5e-3


def test_trapezoid_direction(dicho_phi, dicho_engine):
    exact = dicho_engine.coefficient(dicho_phi, 0, 20).value
    errs = [abs(fourier_trapezoid(dicho_phi, 0, K).value - exact) for K in (6, 8, 10)]
    assert errs[0] > errs[1] > errs[2]
    split = fourier_trapezoid(dicho_phi, 0, 10, engine=dicho_engine, split_closed=True)
    assert abs(split.value - exact) < 1e-2


def test_rejects_sensitive_or_float():
    tt = fx.load_fixture("triangular_tiling")
    sol = cascade_solve(tt, JordanChain(Eigenvalue(ex.ONE), [[1.0, 0.0]]), 2)
    with pytest.raises(UnsupportedError):
        MomentTable.for_solution(sol)
