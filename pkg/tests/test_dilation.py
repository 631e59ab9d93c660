from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radixasym import exact as ex
from radixasym import fixtures as fx
from radixasym.dilation import (badic, cascade_solve, estimate_exponent, evaluate_columns, evaluate_F,
                                fixed_point_residual, holder_estimate, oscillations,
                                piecewise_candidate)
from radixasym.errors import InputError, IrrationalEigenvalueError, RefinementDepthError
from radixasym.linrep import q_matrix
from radixasym.spectral import Eigenvalue, JordanChain, jordan_decompose, jordan_from_basis


def coin_cdf(x, p0, max_digits=80):
    """Mass of ``[0, x)`` under the digit measure with ``P(0) = p0``, read off the binary digits."""
    if x >= 1:
        return Fraction(1)
    total, w = Fraction(0), Fraction(1)
    for _ in range(max_digits):
        if not x:
            break
        x *= 2
        if x >= 1:
            total += w * p0
            w *= 1 - p0
            x -= 1
        else:
            w *= p0
    return total


@pytest.fixture(scope="module")
def coin_sol():
    coin = fx.load_fixture("biased_coin")
    chain = JordanChain(Eigenvalue(ex.ONE), [[ex.ONE]])
    return cascade_solve(coin, chain, 10)


@pytest.fixture(scope="module")
def dicho_sol(dicho):
    jd = jordan_from_basis(q_matrix(dicho), dicho.meta["jordan_basis"])
    return cascade_solve(dicho, jd.chains[0], 8)


def test_badic():
    assert badic(ex.mpq(3, 8), 2) == (3, 3)
    assert badic(ex.mpq(4, 8), 2) == (1, 1)
    assert badic(ex.mpq(1, 3), 2) is None
    assert badic(ex.mpq(1, 3), 3) == (1, 1)
    assert badic(ex.ZERO, 2) == (0, 0)


def test_coin_against_oracle(coin_sol):
    p0 = Fraction(1, 5)
    for x in coin_sol.points():
        got = evaluate_columns(coin_sol, x)[0][0]
        assert Fraction(int(got.numerator), int(got.denominator)) == coin_cdf(Fraction(int(x.numerator), int(x.denominator)), p0)


def test_coin_refinement(coin_sol):
    x = ex.mpq(12345, 2 ** 15)
    got = evaluate_columns(coin_sol, x)[0][0]
    assert Fraction(int(got.numerator), int(got.denominator)) == coin_cdf(Fraction(12345, 2 ** 15), Fraction(1, 5))
    assert coin_sol.depth == 10
    with pytest.raises(RefinementDepthError):
        evaluate_columns(coin_sol, ex.mpq(1, 2 ** 40), max_refinement=5)
    with pytest.raises(InputError):
        evaluate_columns(coin_sol, ex.mpq(1, 3))


def test_boundary_values(dicho_sol):
    assert evaluate_columns(dicho_sol, ex.ZERO) == dicho_sol.zero_cols
    assert evaluate_columns(dicho_sol, ex.ONE) == dicho_sol.V
    F = evaluate_F(dicho_sol, ex.mpq(1, 2))
    assert len(F) == 6 and len(F[0]) == 2


def test_fixed_point_residual_exact(dicho_sol, coin_sol):
    assert fixed_point_residual(dicho_sol) == (0, [])
    assert fixed_point_residual(coin_sol)[0] == 0


def test_candidate_substitution(coin_sol):
    good = piecewise_candidate([lambda x: [ex.to_rational(coin_cdf(x, Fraction(1, 5)))]])
    assert fixed_point_residual(coin_sol, good, depth=8)[0] == 0
    wrong = piecewise_candidate([lambda x: [ex.to_rational(x)]])
    worst, bad = fixed_point_residual(coin_sol, wrong, depth=6)
    assert worst > 0 and bad


def test_extend_keeps_values(dicho):
    jd = jordan_from_basis(q_matrix(dicho), dicho.meta["jordan_basis"])
    sol = cascade_solve(dicho, jd.chains[0], 4)
    before = dict(sol.values)
    sol.extend(7)
    assert all(sol.values[k] == v for k, v in before.items())
    fresh = cascade_solve(dicho, jd.chains[0], 7)
    assert fresh.values == sol.values


@settings(max_examples=30, deadline=None)
@given(st.fractions(min_value=0, max_value=1), st.integers(2, 3))
def test_coin_grid_monotone(p0, B):
    # any digit measure: F is monotone with F(1) = 1
    if B != 2 or p0 in (0, 1):
        return
    coin = fx.biased_coin(ex.to_rational(p0))
    sol = cascade_solve(coin, JordanChain(Eigenvalue(ex.ONE), [[ex.ONE]]), 6)
    vals = [evaluate_columns(sol, x)[0][0] for x in sol.points()]
    assert vals == sorted(vals) and vals[-1] == 1


def test_holder_and_exponent(coin_sol):
    rep = holder_estimate(coin_sol, 0.3)
    assert rep.passed and rep.constant == pytest.approx(1.0)
    assert not holder_estimate(coin_sol, 0.9, cap=1.0).passed
    om = oscillations(coin_sol)
    assert om[0] == 1 and om[1] == pytest.approx(0.8)
    assert estimate_exponent(coin_sol) == pytest.approx(0.32193, abs=1e-4)
    with pytest.raises(InputError):
        holder_estimate(coin_sol, 0)


def test_dicho_exponent(dicho_sol):
    # chain at 2 with a cell of size 2: the second column is Lipschitz with a log factor
    assert estimate_exponent(dicho_sol, functional=lambda cols: cols[1][5]) > 0.8


def test_cascade_errors():
    rs = fx.load_fixture("rudin_shapiro")
    jd = jordan_decompose(q_matrix(rs), numeric=True)
    with pytest.raises(IrrationalEigenvalueError):
        cascade_solve(rs, jd.chains[0], 3)
    sol = cascade_solve(rs, jd.chains[0], 6, allow_numeric=True)
    assert abs(fixed_point_residual(sol)[0]) < 1e-9
    with pytest.raises(InputError):
        cascade_solve(rs, JordanChain(Eigenvalue(ex.ZERO), [[ex.ONE, ex.ZERO]]), 2)


def test_float_argument(coin_sol):
    h = holder_estimate(coin_sol, 0.3)
    v = evaluate_F(coin_sol, 0.3, holder=h)
    assert v.error_bound < 0.2
    assert abs(float(v.value[0][0]) - float(coin_cdf(Fraction(3, 10), Fraction(1, 5)))) <= v.error_bound + 1e-12
