"""Fourier coefficients of the dichopile fluctuation by both routes."""

import mpmath

from radixasym import fixtures as fx
from radixasym.asym import build_expansion
from radixasym.fourier import FourierEngine, fourier_trapezoid


def main():
    exp = build_expansion(fx.load_fixture("dichopile"), depth=12)
    phi = next(t for t in exp.terms if t.constant is None)
    engine = FourierEngine(exp)
    print("closed forms found for (chain, column):", sorted(engine.closed))
    for k in (0, 1, 2, 10):
        c = engine.coefficient(phi, k, digits=50)
        print(f"c_{k} = {mpmath.nstr(c.value, 50)}  [{c.method}]")
    exact = engine.coefficient(phi, 0, 30).value
    for K in (8, 10, 12):
        t = fourier_trapezoid(phi, 0, K).value
        print(f"trapezoid K={K}: {mpmath.nstr(t.real, 12)}  error {mpmath.nstr(abs(t - exact), 3)}")


if __name__ == "__main__":
    main()
