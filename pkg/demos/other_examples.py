"""Rudin-Shapiro symmetry, the biased coin and the triangular tiling."""

import math

from radixasym import exact as ex
from radixasym import fixtures as fx
from radixasym.asym import build_expansion, phi_eval, render_text
from radixasym.dilation import cascade_solve, estimate_exponent, holder_estimate
from radixasym.linrep import DigitWord, sigma_recursive
from radixasym.spectral import Eigenvalue, JordanChain


def rudin_shapiro():
    exp = build_expansion(fx.load_fixture("rudin_shapiro4"), depth=10)
    print("Rudin-Shapiro (radix 4):", render_text(exp))
    phi = next(t for t in exp.terms if t.constant is None)
    for s in (0.0, 0.2, 0.4, 0.5):
        t = math.log(4 ** s + 2, 4)
        v = 2 ** s * phi_eval(phi, s).value.real + 2 ** t * phi_eval(phi, t).value.real
        print(f"  s={s:.1f} t={t:.4f}: 2^s Phi(s) + 2^t Phi(t) = {v:.6f}")


def biased_coin():
    sol = cascade_solve(fx.load_fixture("biased_coin"), JordanChain(Eigenvalue(ex.ONE), [[ex.ONE]]), 12)
    print("biased coin: Hölder constant at 0.3 =", holder_estimate(sol, 0.3).constant,
          " exponent estimate =", round(estimate_exponent(sol), 4),
          " log2(5/4) =", round(math.log2(5 / 4), 4))


def tiling():
    rep = fx.load_fixture("triangular_tiling")
    for K in (0, 5, 10, 20):
        v = sigma_recursive(rep, None, 2 * K + 2, DigitWord(fx.tiling_point(K), 2))
        print(f"tiling K={K}: |Sigma| = {math.hypot(*v):.12f}")


if __name__ == "__main__":
    rudin_shapiro()
    biased_coin()
    tiling()
