"""Dilation equations solved by the cascade algorithm.

For a Jordan chain ``V = (V^(0), ..., V^(nu-1))`` with cell ``J`` the
matrix-valued function ``F`` on ``[0, 1]`` satisfies

    F(x) J = sum_b A_b F(B x - b),    F = 0 on x <= 0,  F = V on x >= 1.

Away from the boundary of the digit intervals this reads
``F(x) J = sum_{b < x_1} A_b V + A_{x_1} F(B x - x_1)`` where ``x_1`` is the
first digit of ``x``, so the values at depth ``k + 1`` follow from those at
depth ``k``.  Columns are solved one by one, ``F^(j) = (G^(j) - F^(j-1)) / lambda``,
which avoids forming ``J^{-1}``.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from . import exact as ex
from .errors import InputError, IrrationalEigenvalueError, RefinementDepthError

MAX_REFINEMENT = 200


def badic(x, B):
    """``(i, k)`` with ``x = i / B^k`` in lowest terms, or ``None``."""
    x = ex.to_rational(x)
    num, den = int(x.numerator), int(x.denominator)
    k, p = 0, 1
    while p % den:
        p *= B
        k += 1
        if k > 4 * den.bit_length() + 4:
            return None
    return _reduce(num * (p // den), k, B)


def _reduce(i, k, B):
    while k and i % B == 0:
        i //= B
        k -= 1
    if i == 0:
        return 0, 0
    return i, k


@dataclass
class JordanCell:
    eigenvalue: object
    size: int

    @property
    def rho(self):
        return float(abs(self.eigenvalue)) if ex.is_exact(self.eigenvalue) else abs(complex(self.eigenvalue))


class DilationSolution:
    """Grid values of ``F`` for one chain.

    ``values`` maps the reduced pair ``(i, k)`` of the point ``i / B^k`` to
    the list of columns ``[F^(0)(x), ..., F^(nu-1)(x)]``.
    """

    def __init__(self, rep, eigenvalue, V, exact):
        self.rep = rep
        self.eigenvalue = eigenvalue
        self.V = [list(v) for v in V]
        self.exact = exact
        self.depth = 0
        d = rep.dim
        z = _zero_of(eigenvalue, V)
        self.zero_cols = [[z] * d for _ in V]
        self.values = {(0, 0): self.zero_cols, (1, 0): self.V}
        self._sparse = [ex.sparse_rows(A) for A in rep.A]
        self._prefix = _prefix_vectors(rep, self.V, z)

    @property
    def cell(self):
        return JordanCell(self.eigenvalue, len(self.V))

    @property
    def size(self):
        return len(self.V)

    def points(self, depth=None):
        """Grid points ``i / B^depth`` as exact rationals, increasing."""
        depth = self.depth if depth is None else depth
        B = self.rep.radix
        return [ex.mpq(i, B ** depth) for i in range(B ** depth + 1)]

    def columns_at(self, i, k):
        return self.values[_reduce(i, k, self.rep.radix)]

    def _step(self, c, cols_y):
        """Columns of ``F(x)`` from the first digit ``c`` and ``F(Bx - c)``."""
        lam = self.eigenvalue
        S = self._sparse[c]
        out = []
        prev = None
        for j, fy in enumerate(cols_y):
            g = ex.vec_add(self._prefix[c][j], ex.sparse_mat_vec(S, fy))
            if prev is not None:
                g = ex.vec_sub(g, prev)
            col = [a / lam for a in g]
            out.append(col)
            prev = col
        return out

    def extend(self, depth):
        """Refine the grid to ``depth``; existing values are never touched."""
        B = self.rep.radix
        for k in range(self.depth + 1, depth + 1):
            Bk1 = B ** (k - 1)
            for i in range(1, B ** k):
                if i % B == 0:
                    continue
                c, rest = divmod(i, Bk1)
                cols_y = self.values[_reduce(rest, k - 1, B)] if rest else self.zero_cols
                self.values[(i, k)] = self._step(c, cols_y)
            self.depth = k
        return self

    def component(self, j, x):
        """``F^(j)(x)`` as a column vector."""
        return evaluate_columns(self, x)[j]


def _zero_of(eigenvalue, V):
    z = eigenvalue * 0
    for v in V:
        for a in v:
            z = z + a * 0
    return z


def _prefix_vectors(rep, V, z):
    B, d = rep.radix, rep.dim
    out = []
    acc = [[z] * d for _ in V]
    for b in range(B):
        out.append([list(a) for a in acc])
        acc = [ex.vec_add(a, ex.mat_vec(rep.A[b], v)) for a, v in zip(acc, V)]
    return out


def cascade_solve(rep, chain, depth, V=None, allow_numeric=False):
    """Cascade algorithm up to ``depth`` for a Jordan chain.

    ``chain`` is a :class:`~radixasym.spectral.JordanChain` (or any object
    with ``eigenvalue`` and ``vectors``); ``V`` overrides the chain vectors.
    """
    ev = chain.eigenvalue
    lam = ev.value
    vectors = chain.vectors if V is None else V
    if not ev.exact and rep.exact and not allow_numeric:
        raise IrrationalEigenvalueError(
            "cascade on an exact representation needs a rational eigenvalue "
            "(pass allow_numeric=True for the approximate path)")
    if lam == 0:
        raise InputError("cascade needs a nonzero eigenvalue (rho = 0 makes J singular)")
    if ev.exact and not rep.exact:
        lam = float(lam)
    if not ev.exact:
        lam = complex(lam)
        vectors = [[complex(a) for a in v] for v in vectors]
    exact = ev.exact and rep.exact
    sol = DilationSolution(rep, lam, vectors, exact)
    return sol.extend(depth)


def evaluate_columns(sol, x, max_refinement=MAX_REFINEMENT):
    """Columns of ``F(x)`` at an exact B-adic ``x``, refining locally if needed."""
    x = ex.to_rational(x)
    if x <= 0:
        return sol.zero_cols
    if x >= 1:
        return sol.V
    B = sol.rep.radix
    pos = badic(x, B)
    if pos is None:
        raise InputError(f"{x} is not a {B}-adic rational")
    i, k = pos
    if k <= sol.depth:
        return sol.values[(i, k)]
    if k - sol.depth > max_refinement:
        raise RefinementDepthError(f"{x} needs {k - sol.depth} refinement levels beyond the grid")
    c, rest = divmod(i, B ** (k - 1))
    cols_y = evaluate_columns(sol, ex.mpq(rest, B ** (k - 1)), max_refinement)
    return sol._step(c, cols_y)


@dataclass
class ApproxValue:
    """Nearest-grid value for a non-B-adic argument."""

    value: list
    grid_x: object
    error_bound: float


def evaluate_F(sol, x, holder=None):
    """``F(x)`` as a ``d x nu`` matrix.

    Exact B-adic input gives the exact value (local refinement beyond the
    stored depth).  A float ``x`` gives an :class:`ApproxValue` at the
    nearest grid point, with error bound ``c (B^-K)^alpha / 2^alpha`` when a
    :class:`HolderReport` is supplied (``inf`` otherwise).
    """
    if isinstance(x, float):
        B, K = sol.rep.radix, sol.depth
        i = min(max(round(x * B ** K), 0), B ** K)
        gx = ex.mpq(i, B ** K)
        cols = evaluate_columns(sol, gx)
        bound = float("inf")
        if holder is not None:
            bound = holder.constant * abs(x - float(gx)) ** holder.alpha
        return ApproxValue(ex.from_columns(cols, sol.rep.dim), gx, bound)
    return ex.from_columns(evaluate_columns(sol, x), sol.rep.dim)


def _abs_max(vals):
    m = 0
    for v in vals:
        a = abs(v)
        if a > m:
            m = a
    return m


def fixed_point_residual(sol, candidate=None, depth=None):
    """Largest entry of ``F(x) J - sum_b A_b F(Bx - b)`` over the grid.

    ``candidate`` (a function ``x -> list of columns``) replaces the stored
    values, which turns this into a substitution check for a guessed closed
    form; the boundary values are then checked as well.  Returns
    ``(max_residual, offending_points)``.
    """
    rep, lam = sol.rep, sol.eigenvalue
    B = rep.radix
    depth = sol.depth if depth is None else depth
    if candidate is None:
        def F(x):
            return evaluate_columns(sol, x)
    else:
        def F(x):
            if x <= 0:
                return sol.zero_cols
            if x >= 1:
                return sol.V
            return candidate(x)
    worst = 0
    bad = []
    if candidate is not None:
        for x, want in ((ex.ZERO, sol.zero_cols), (ex.ONE, sol.V)):
            got = candidate(x)
            r = _abs_max(a - b for cg, cw in zip(got, want) for a, b in zip(cg, cw))
            if r:
                bad.append(x)
                worst = max(worst, r)
    for x in sol.points(depth):
        cols = F(x)
        lhs = []
        prev = None
        for col in cols:
            c = [lam * a for a in col]
            if prev is not None:
                c = ex.vec_add(c, prev)
            lhs.append(c)
            prev = col
        rhs = [list(z) for z in sol.zero_cols]
        for b in range(B):
            fy = F(B * x - b)
            rhs = [ex.vec_add(r, ex.sparse_mat_vec(sol._sparse[b], f)) for r, f in zip(rhs, fy)]
        r = _abs_max(a - b for cl, cr in zip(lhs, rhs) for a, b in zip(cl, cr))
        if r:
            bad.append(x)
            worst = max(worst, r)
    return worst, bad


# -- regularity ---------------------------------------------------------------

@dataclass
class HolderReport:
    alpha: float
    constant: float
    cap: float = None
    passed: bool = True


def _functional(sol, functional):
    """Map grid columns to the vector whose increments are measured."""
    if functional is None:
        return lambda cols: [complex(a) for col in cols for a in col]
    return lambda cols: [complex(functional(cols))]


def _grid_vectors(sol, functional):
    f = _functional(sol, functional)
    B, K = sol.rep.radix, sol.depth
    return [f(sol.columns_at(i, K) if 0 < i < B ** K else (sol.zero_cols if i == 0 else sol.V))
            for i in range(B ** K + 1)]


def _dist(u, v):
    return max((abs(a - b) for a, b in zip(u, v)), default=0.0)


def holder_estimate(sol, alpha, cap=None, functional=None):
    """Hölder constant ``max ||F(y) - F(x)|| / |y - x|^alpha`` on the grid.

    Pairs are ``(x, x + B^-k)`` for every grid point ``x`` and every scale
    ``k <= depth`` (adjacent points are the case ``k = depth``).  The norm is
    the max norm over all components, or over ``functional(columns)``.
    """
    if not 0 < alpha <= 1:
        raise InputError("alpha must lie in (0, 1]")
    vals = _grid_vectors(sol, functional)
    B, K = sol.rep.radix, sol.depth
    n = B ** K
    const = 0.0
    for k in range(K + 1):
        step = B ** (K - k)
        h = float(B) ** (-k)
        osc = max((_dist(vals[i], vals[i + step]) for i in range(0, n - step + 1)), default=0.0)
        const = max(const, osc / h ** alpha)
    passed = math.isfinite(const) and (cap is None or const <= cap)
    return HolderReport(alpha, const, cap, passed)


def oscillations(sol, functional=None):
    """``omega_k = max_x ||F(x + B^-k) - F(x)||`` for ``k = 0..depth``."""
    vals = _grid_vectors(sol, functional)
    B, K = sol.rep.radix, sol.depth
    n = B ** K
    out = []
    for k in range(K + 1):
        step = B ** (K - k)
        out.append(max((_dist(vals[i], vals[i + step]) for i in range(0, n - step + 1)), default=0.0))
    return out


def estimate_exponent(sol, functional=None, skip=2):
    """Least-squares slope of ``-log_B omega_k`` against ``k``.

    The first ``skip`` scales are dropped; scales with zero oscillation are
    ignored.
    """
    B = sol.rep.radix
    om = oscillations(sol, functional)
    pts = [(k, -math.log(w) / math.log(B)) for k, w in enumerate(om) if k >= skip and w > 0]
    if len(pts) < 2:
        return float("inf")
    mk = sum(k for k, _ in pts) / len(pts)
    my = sum(y for _, y in pts) / len(pts)
    num = sum((k - mk) * (y - my) for k, y in pts)
    den = sum((k - mk) ** 2 for k, _ in pts)
    return num / den


def piecewise_candidate(funcs):
    """Wrap per-column functions ``x -> vector`` for :func:`fixed_point_residual`."""
    return lambda x: [f(Fraction(int(x.numerator), int(x.denominator))) for f in funcs]
