"""Dichopile cost: from the recurrence to the periodic fluctuation.

Run with ``python3 demos/dichopile_walkthrough.py``.
"""

from fractions import Fraction

from radixasym import fixtures as fx
from radixasym.asym import build_expansion, expansion_eval, phi_grid, render_text
from radixasym.dilation import cascade_solve, evaluate_columns
from radixasym.linrep import check_against_oracle, eval_range, q_matrix
from radixasym.spectral import best_bounds, decompose_C, jordan_from_basis


def main():
    rep = fx.load_fixture("dichopile")
    print("u_0..u_15:", [int(v) for v in eval_range(rep, 15)])
    u = fx.dichopile_oracle(4096)
    print("matches the recurrence up to 4096:", check_against_oracle(rep, u.__getitem__, 4096) is None)

    jd = jordan_from_basis(q_matrix(rep), rep.meta["jordan_basis"])
    print("chains:", [(str(c.eigenvalue), c.size) for c in jd.chains])
    print("gamma:", [str(g) for g in decompose_C(jd, rep.C)])
    b = best_bounds(rep, 8)
    print(f"JSR in [{b.lower:.4f}, {b.upper:.4f}] from words of length {b.T}")

    sol = cascade_solve(rep, jd.chains[0], 6)
    for x in ("1/4", "1/2", "3/4", "1"):
        g = evaluate_columns(sol, Fraction(x))[1]
        print(f"g({x}) =", [str(v) for v in g])

    exp = build_expansion(rep, depth=12)
    print("expansion:", render_text(exp))
    phi = next(t for t in exp.terms if t.constant is None)
    top = max(phi_grid(phi, 12), key=lambda r: r[2].real)
    print(f"max Phi on the depth-12 grid: {top[2].real:.6f} at x = {top[0]}")
    f = fx.dichopile_costs(2 ** 16)
    for N in (1000, 10 ** 4, 65536):
        print(f"N={N}: f_N={f[N]}  expansion={expansion_eval(exp, N).real:.3f}")


if __name__ == "__main__":
    main()
