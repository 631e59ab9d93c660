import json

import pytest
from hypothesis import given, settings
from strategies import small_reps

from radixasym import exact as ex
from radixasym import fixtures as fx
from radixasym.errors import (DimensionCapError, EnumerationGuardError, InputError, MantissaError,
                              RadixMismatchError)
from radixasym.linrep import (DigitWord, LinearRepresentation, close_under_multisection, digits,
                              dumps, eval_range, eval_seq, eval_word, is_zero_insensitive,
                              loads, mantissa, partial_sum_direct, partial_sum_via_series,
                              partial_sums, q_matrix, radix_power, sigma_direct, sigma_recursive,
                              transposed)


def test_digits_examples():
    assert list(digits(5, 2)) == [1, 0, 1]
    assert list(digits(0, 7)) == []
    assert list(digits(10, 4)) == [2, 2]
    assert digits(12345, 3).value() == 12345
    with pytest.raises(InputError):
        digits(-1, 2)


def test_digit_word_range():
    with pytest.raises(InputError):
        DigitWord([2], 2)


def test_eval_word_dichopile(dicho):
    assert eval_word(dicho, DigitWord([1, 0, 1], 2)) == 1
    assert eval_word(dicho, DigitWord([], 2)) == 0
    assert eval_word(dicho, DigitWord([1, 0, 0], 2)) == 2
    assert eval_seq(dicho, 1) == 1
    assert eval_seq(dicho, 0) == 0


def test_eval_radix_mismatch(dicho):
    with pytest.raises(RadixMismatchError):
        eval_word(dicho, DigitWord([2], 3))


def test_dichopile_matches_recurrence(dicho):
    assert eval_range(dicho, 2000) == fx.dichopile_oracle(2000)
    assert [eval_seq(dicho, n) for n in range(16)] == [0, 1, 1, 1, 2, 1, 2, 2, 2, 1, 3, 2, 2, 2, 3, 2]


def test_rudin_shapiro_values():
    rs = fx.load_fixture("rudin_shapiro")
    assert eval_seq(rs, 3) == -1
    assert eval_range(rs, 1024) == [fx.rudin_shapiro(n) for n in range(1025)]
    rs4 = fx.load_fixture("rudin_shapiro4")
    assert eval_range(rs4, 1024) == eval_range(rs, 1024)


def test_zero_insensitivity():
    assert is_zero_insensitive(fx.load_fixture("dichopile"))
    assert is_zero_insensitive(fx.load_fixture("rudin_shapiro"))
    bad = LinearRepresentation([1, 0], [[[0, 0], [0, 0]], [[1, 0], [0, 1]]], [1, 0])
    assert not is_zero_insensitive(bad)


def test_leading_zeros_ignored(dicho):
    for n in range(1, 200):
        w = list(digits(n, 2))
        assert eval_word(dicho, DigitWord([0, 0] + w, 2)) == eval_word(dicho, DigitWord(w, 2))


def test_q_matrix():
    assert q_matrix(fx.load_fixture("biased_coin")) == [[1]]
    z = LinearRepresentation([1, 1], [[[0, 0], [0, 0]]] * 2, [1, 1])
    assert q_matrix(z) == [[0, 0], [0, 0]]
    d = fx.load_fixture("dichopile")
    assert q_matrix(d)[1] == [1, 1, 0, 1, 0, 0]


def test_partial_sums(dicho):
    assert partial_sum_direct(dicho, 4) == 5
    assert partial_sum_direct(dicho, 0) == eval_seq(dicho, 0)
    sod = fx.load_fixture("sum_of_digits")
    assert partial_sum_direct(sod, 7) == 12
    f = fx.dichopile_costs(3000)
    assert partial_sums(dicho, 3000) == f


def test_partial_sum_via_series_dichopile(dicho):
    f = fx.dichopile_costs(4100)
    for N in list(range(300)) + [1023, 1024, 1025, 4095, 4096, 4099]:
        assert partial_sum_via_series(dicho, N) == f[N]


def test_partial_sum_boundary_power(dicho):
    # N = B^K - 1 gives L Q^K C for a zero-insensitive representation
    Q = q_matrix(dicho)
    for K in range(1, 9):
        v = ex.mat_vec(ex.mat_pow(Q, K), dicho.C)
        assert partial_sum_via_series(dicho, 2 ** K - 1) == ex.dot(dicho.L, v)


def test_partial_sum_correction_for_sensitive_rep():
    coin = fx.load_fixture("biased_coin")
    for N in range(200):
        assert partial_sum_via_series(coin, N) == partial_sum_direct(coin, N)


def test_sigma_basic(dicho):
    Q = q_matrix(dicho)
    assert sigma_direct(dicho, None, 0, ex.mpq(1, 3)) == dicho.C
    assert sigma_recursive(dicho, None, 0, DigitWord([], 2)) == dicho.C
    for K in range(6):
        want = ex.mat_vec(ex.mat_pow(Q, K), dicho.C)
        assert sigma_direct(dicho, None, K, ex.ONE) == want
        assert sigma_recursive(dicho, None, K, ex.ONE) == want


def test_sigma_exhaustive_dichopile(dicho):
    for K in range(1, 9):
        for j in range(0, 2 ** 8 + 1, 3):
            x = ex.mpq(j, 2 ** 8)
            a = sigma_recursive(dicho, None, K, x)
            assert a == sigma_direct(dicho, None, K, x), (K, j)


def test_sigma_guard_and_mantissa(dicho):
    with pytest.raises(EnumerationGuardError):
        sigma_direct(dicho, None, 12, ex.mpq(1, 2), guard=2 ** 10)
    with pytest.raises(MantissaError):
        sigma_recursive(dicho, None, 4, DigitWord([1, 0], 2))
    with pytest.raises(InputError):
        sigma_direct(dicho, None, 3, 0.5)
    assert list(mantissa(ex.mpq(5, 8), 2, 4)) == [1, 0, 1, 0]


def test_triangular_tiling_growth():
    rep = fx.load_fixture("triangular_tiling")
    assert not rep.exact
    for K in range(0, 6):
        w = DigitWord(fx.tiling_point(K), 2)
        v = sigma_recursive(rep, None, 2 * K + 2, w)
        assert abs(v[0] - (K + 1)) < 1e-9 and abs(v[1]) < 1e-9
        b = sigma_direct(rep, None, 2 * K + 2, w)
        assert max(abs(p - q) for p, q in zip(v, b)) < 1e-9


@settings(max_examples=60, deadline=None)
@given(small_reps())
def test_sigma_property(rep):
    B = rep.radix
    for K in range(0, 5):
        for j in range(0, B ** K + 1):
            x = ex.mpq(j, B ** K) if K else ex.mpq(j % 2)
            assert sigma_recursive(rep, None, K, x) == sigma_direct(rep, None, K, x)


@settings(max_examples=40, deadline=None)
@given(small_reps(zero_insensitive=False))
def test_partial_sum_property_general(rep):
    sums = partial_sums(rep, 200)
    for N in range(0, 201, 7):
        assert partial_sum_via_series(rep, N) == sums[N]


def test_closure_sum_of_digits():
    rep = close_under_multisection(fx.sum_of_digits, 2, window=64, dim_cap=8)
    assert rep.dim == 2
    assert is_zero_insensitive(rep)
    assert eval_range(rep, 4096) == [fx.sum_of_digits(n) for n in range(4097)]


def test_closure_binary_powering():
    rep = close_under_multisection(fx.binary_powering_cost, 2, window=64, dim_cap=8)
    assert rep.dim <= 3
    assert eval_range(rep, 2 ** 12) == [fx.binary_powering_cost(n) for n in range(2 ** 12 + 1)]


def test_closure_zero_and_cap():
    z = close_under_multisection(lambda n: 0, 2, window=16, dim_cap=4)
    assert z.dim == 0
    assert eval_range(z, 10) == [0] * 11
    with pytest.raises(DimensionCapError):
        close_under_multisection(fx.sum_of_digits, 2, window=16, dim_cap=1)
    with pytest.raises(InputError):
        close_under_multisection(fx.sum_of_digits, 2, window=2, dim_cap=4)


def test_closure_radix3():
    rep = close_under_multisection(lambda n: fx.sum_of_digits(n, 3), 3, window=81, dim_cap=8)
    assert eval_range(rep, 729) == [fx.sum_of_digits(n, 3) for n in range(730)]


def test_json_round_trip(dicho):
    text = dumps(dicho)
    back = loads(text)
    assert back == dicho
    assert back.meta["jordan_basis"] == dicho.meta["jordan_basis"]
    data = json.loads(text)
    assert data["A"][0][1][0] == "1"
    tt = fx.load_fixture("triangular_tiling")
    assert loads(dumps(tt)) == tt


def test_json_errors():
    with pytest.raises(InputError, match="line 2"):
        loads('{\n "radix": }')
    with pytest.raises(InputError, match="missing key"):
        loads('{"radix": 2, "dim": 1, "L": ["1"], "C": ["1"]}')
    with pytest.raises(InputError):
        loads('{"radix": 2, "dim": 2, "L": ["1"], "A": [[["1"]], [["1"]]], "C": ["1"]}')
    with pytest.raises(InputError):
        loads('{"radix": 2, "dim": 1, "L": ["1/0"], "A": [[["1"]], [["1"]]], "C": ["1"]}')


def test_transpose_import(dicho):
    t = transposed(dicho)
    back = loads(dumps(t), transpose=True)
    assert back == dicho


def test_radix_power():
    rs = fx.load_fixture("rudin_shapiro")
    rs4 = radix_power(rs, 2)
    assert rs4.radix == 4
    assert rs4.A[1] == ex.mat_mul(rs.A[0], rs.A[1])
    assert eval_range(rs4, 300) == eval_range(rs, 300)
    with pytest.raises(InputError):
        radix_power(fx.load_fixture("biased_coin"))
