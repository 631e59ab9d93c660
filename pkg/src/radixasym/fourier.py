"""Fourier coefficients of the periodic fluctuations.

With ``u = 1 + log_B x`` a primitive
``coef * lambda^(1-u) * f(x) * binom(1-u, p)`` (``f = L F^(q)``) contributes

    c_k = coef * (1/ln B) * int_{1/B}^1 x^(-sigma_k - 1) f(x) binom(-log_B x, p) dx,
    sigma_k = log_B lambda + chi_k,   chi_k = 2 pi i k / ln B,

to the ``k``-th coefficient of its term.  Three routes are offered:

* exact integration when ``f`` is a piecewise polynomial (closed form);
* for ``p = 0``, the Mellin transform ``f*(s) = int_{1/B}^1 x^(s-1) f(x) dx``
  at ``s = -sigma_k``, summed as the Newton series
  ``sum_n binom(s-1, n) Delta^n f*(1)`` whose differences come exactly from
  the moments of ``F``;
* the trapezoidal rule on the cascade grid.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
import mpmath

from . import exact as ex
from .asym import require_rational_phases
from .dilation import evaluate_columns
from .errors import (InputError, InsufficientTermsError, MellinDerivativeError,
                     ResonanceError, UnsupportedError, ValidationError)


def _mpf(x):
    """mpmath number from an exact rational (mpq is not accepted directly)."""
    if ex.is_exact(x):
        x = ex.to_rational(x)
        return mpmath.mpf(int(x.numerator)) / int(x.denominator)
    return mpmath.mpmathify(x)


# -- moments -------------------------------------------------------------------

class MomentTable:
    """Exact moments ``M_l = int_0^1 F(z) z^(l-1) dz`` of one chain.

    Columns satisfy

        (B^l lambda I - Q) M_l^j = -B^l M_l^(j-1)
            + (1/l) sum_{b < B-1} (B^l - (b+1)^l) A_b V^(j)
            + sum_{k < l} binom(l-1, k-1) (sum_b b^(l-k) A_b) M_k^j,

    and the partial moments over ``[r/B, (r+1)/B]`` follow from
    ``M_{l,r} J = sum_{b<r} ((r+1)^l - r^l)/(l B^l) A_b V
    + B^-l A_r sum_k binom(l-1, k-1) r^(l-k) M_k``.
    The table grows on demand.
    """

    def __init__(self, rep, eigenvalue, V):
        if not rep.exact or not ex.is_exact(eigenvalue):
            raise UnsupportedError("moments need an exact representation and a rational eigenvalue")
        self.rep = rep
        self.lam = ex.to_rational(eigenvalue)
        self.V = [list(v) for v in V]
        self.nu = len(V)
        self.B = rep.radix
        self.Q = None
        self.M = {}          # l -> list of columns
        self._AM = {}        # l -> [b][j] -> A_b M_l^j
        self._W = [[ex.mat_vec(A, v) for v in self.V] for A in rep.A]
        self._sparse = [ex.sparse_rows(A) for A in rep.A]
        self._LW = [[ex.dot(rep.L, w) for w in Wb] for Wb in self._W]
        self._LS = {}
        self.L_max = 0

    @classmethod
    def for_solution(cls, sol):
        return cls(sol.rep, sol.eigenvalue, sol.V)

    def _q(self):
        if self.Q is None:
            Q = ex.zeros(self.rep.dim, self.rep.dim)
            for A in self.rep.A:
                Q = ex.mat_add(Q, A)
            self.Q = Q
        return self.Q

    def extend(self, L_max):
        B, d = self.B, self.rep.dim
        Q = self._q()
        for ell in range(self.L_max + 1, L_max + 1):
            Bl = B ** ell
            Mat = [[(Bl * self.lam if i == j else ex.ZERO) - Q[i][j] for j in range(d)] for i in range(d)]
            try:
                inv = ex.inverse(Mat)
            except ZeroDivisionError:
                raise ResonanceError(
                    f"B^l lambda = {Bl * self.lam} is an eigenvalue of Q at l = {ell}", ell=ell) from None
            cols = []
            sums = [[None] * self.nu for _ in range(B)]
            for j in range(self.nu):
                rhs = [ex.ZERO] * d
                if j:
                    rhs = [-Bl * a for a in cols[j - 1]]
                for b in range(B - 1):
                    w = ex.mpq(Bl - (b + 1) ** ell, ell)
                    rhs = [a + w * c for a, c in zip(rhs, self._W[b][j])]
                for b in range(1, B):
                    acc = [ex.ZERO] * d
                    for k in range(1, ell):
                        wt = math.comb(ell - 1, k - 1) * b ** (ell - k)
                        acc = [a + wt * c for a, c in zip(acc, self._AM[k][b][j])]
                    sums[b][j] = acc
                    rhs = ex.vec_add(rhs, acc)
                cols.append(ex.mat_vec(inv, rhs))
            self.M[ell] = cols
            self._AM[ell] = [[ex.sparse_mat_vec(S, c) for c in cols] for S in self._sparse]
            # L (sum_{k <= l} binom(l-1, k-1) r^(l-k) A_r M_k^j), reused by the partial moments
            self._LS[ell] = [None] + [[ex.dot(self.rep.L, ex.vec_add(sums[b][j], self._AM[ell][b][j]))
                                       for j in range(self.nu)] for b in range(1, B)]
            self.L_max = ell
        return self

    def full(self, ell):
        self.extend(ell)
        return self.M[ell]

    def partial(self, ell, r):
        """Columns of ``M_{l,r}`` (vectors)."""
        self.extend(ell)
        B, lam = self.B, self.lam
        Bl = B ** ell
        cols = []
        for j in range(self.nu):
            g = [ex.ZERO] * self.rep.dim
            wt = ex.mpq((r + 1) ** ell - r ** ell, ell * Bl)
            for b in range(r):
                g = [a + wt * c for a, c in zip(g, self._W[b][j])]
            acc = [ex.ZERO] * self.rep.dim
            for k in range(1, ell + 1):
                c0 = math.comb(ell - 1, k - 1) * r ** (ell - k)
                if c0:
                    acc = [a + c0 * c for a, c in zip(acc, self._AM[k][r][j])]
            g = [a + c / Bl for a, c in zip(g, acc)]
            if j:
                g = ex.vec_sub(g, cols[j - 1])
            cols.append([a / lam for a in g])
        return cols

    def partial_scalar(self, ell, r, q):
        """``L M_{l,r}^(q)`` for ``r >= 1`` from the cached scalar sums."""
        if r < 1:
            return ex.dot(self.rep.L, self.partial(ell, r)[q])
        self.extend(ell)
        Bl = self.B ** ell
        wt = ex.mpq((r + 1) ** ell - r ** ell, ell * Bl)
        prev = None
        for j in range(q + 1):
            g = ex.ZERO
            for b in range(r):
                g += wt * self._LW[b][j]
            g += self._LS[ell][r][j] / Bl
            if prev is not None:
                g -= prev
            prev = g / self.lam
        return prev

    def mellin_integer(self, q, ell):
        """``f*(l) = int_{1/B}^1 x^(l-1) L F^(q)(x) dx`` exactly."""
        return sum((self.partial_scalar(ell, r, q) for r in range(1, self.B)), ex.ZERO)

    def residual(self, ell):
        """Residual of the full moment recursion at ``l`` (zero list when exact)."""
        self.extend(ell)
        B, d = self.B, self.rep.dim
        Bl = B ** ell
        Q = self._q()
        out = []
        for j in range(self.nu):
            lhs = ex.vec_sub([Bl * self.lam * a for a in self.M[ell][j]], ex.mat_vec(Q, self.M[ell][j]))
            rhs = [ex.ZERO] * d
            if j:
                rhs = [-Bl * a for a in self.M[ell][j - 1]]
            for b in range(B - 1):
                w = ex.mpq(Bl - (b + 1) ** ell, ell)
                rhs = [a + w * c for a, c in zip(rhs, self._W[b][j])]
            for k in range(1, ell):
                S = ex.zeros(d, d)
                for b in range(1, B):
                    S = ex.mat_add(S, ex.mat_scale(b ** (ell - k), self.rep.A[b]))
                mv = ex.mat_vec(S, self.M[k][j])
                rhs = [a + math.comb(ell - 1, k - 1) * c for a, c in zip(rhs, mv)]
            out.append(ex.vec_sub(lhs, rhs))
        return out


def moments(rep, chain_or_sol, L_max):
    """Moment table up to ``L_max`` for a chain (or a dilation solution)."""
    if hasattr(chain_or_sol, "eigenvalue") and hasattr(chain_or_sol, "vectors"):
        table = MomentTable(rep, chain_or_sol.eigenvalue.value, chain_or_sol.vectors)
    else:
        table = MomentTable(rep, chain_or_sol.eigenvalue, chain_or_sol.V)
    return table.extend(L_max)


# -- Newton series ---------------------------------------------------------------

class NewtonCoefficients:
    """Exact forward differences ``Delta^n f*(1)`` of one scalar primitive.

    Stored as integers over a common denominator; ``ensure(n)`` extends the
    underlying moment table when more terms are needed.
    """

    def __init__(self, table, q, n_max=0):
        self.table = table
        self.q = q
        self.values = []      # f*(1), f*(2), ...
        self.num = []         # Delta^n numerators
        self.den = 1
        self.ensure(n_max)

    @property
    def n_max(self):
        return len(self.num) - 1

    def ensure(self, n):
        if n <= self.n_max:
            return self
        target = max(n, self.n_max + 40)
        for ell in range(len(self.values) + 1, target + 2):
            self.values.append(self.table.mellin_integer(self.q, ell))
        den = gmpy2.mpz(1)
        for v in self.values:
            den = gmpy2.lcm(den, gmpy2.mpz(int(v.denominator)))
        row = [gmpy2.mpz(int(v.numerator)) * (den // int(v.denominator)) for v in self.values]
        num = []
        while row:
            num.append(row[0])
            row = [b - a for a, b in zip(row, row[1:])]
        self.num = num
        self.den = den
        return self

    def delta(self, n):
        """``Delta^n f*(1)`` as an exact rational."""
        self.ensure(n)
        return ex.mpq(self.num[n], self.den)

    def delta_mp(self, n):
        self.ensure(n)
        return mpmath.mpf(int(self.num[n])) / mpmath.mpf(int(self.den))


def newton_differences(table, q, n_max):
    return NewtonCoefficients(table, q, n_max)


@dataclass
class MellinValue:
    value: object
    terms: int
    last_term: float
    peak: float
    dps: int


def _newton_pass(nc, s, tol, max_terms):
    """Sum the series at the current precision; returns (sum, n, last, peak)."""
    total = mpmath.mpc(0)
    b = mpmath.mpc(1)
    sm1 = s - 1
    peak = mpmath.mpf(0)
    peak_n = 0
    small = 0
    n = 0
    last = mpmath.mpf(0)
    while True:
        if n > max_terms:
            raise InsufficientTermsError(
                f"Newton series not converged after {max_terms} terms (last term {float(last):.3g})",
                last_term=float(last))
        nc.ensure(n)
        term = b * nc.delta_mp(n)
        total += term
        mag = abs(term)
        if mag > peak:
            peak, peak_n = mag, n
        last = mag
        if n > peak_n and mag < tol:
            small += 1
            if small >= 4:
                return total, n, last, peak
        else:
            small = 0
        b = b * (sm1 - n) / (n + 1)
        n += 1


def mellin_eval(nc, s, digits=50, max_terms=20000):
    """``f*(s)`` to ``digits`` digits from the Newton series.

    A low-precision pass locates the largest term (cancellation grows with
    ``|Im s|``); the final pass runs with that many extra digits plus a guard.
    """
    tol = mpmath.mpf(10) ** (-(digits + 3))
    with mpmath.workdps(30):
        s1 = mpmath.mpc(s)
        _, n1, _, peak = _newton_pass(nc, s1, tol, max_terms)
    lift = max(0, int(mpmath.ceil(mpmath.log10(peak)))) if peak > 0 else 0
    dps = digits + lift + 12
    with mpmath.workdps(dps):
        total, n, last, peak2 = _newton_pass(nc, mpmath.mpc(s), tol, max_terms)
        return MellinValue(+total, n, float(last), float(peak2), dps)


# -- closed forms ------------------------------------------------------------------

@dataclass
class Piece:
    a: object
    b: object
    coeffs: list  # exact polynomial coefficients, degree 0 upwards


def _poly_at(coeffs, x):
    acc = x * 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _fit(points, values):
    n = len(points)
    M = [[x ** j for j in range(n)] for x in points]
    return ex.solve(M, values)


def _check_points(a, b, B, depth, extra_depth):
    n = B ** depth
    lo, hi = a * n, b * n
    pts = [ex.mpq(i, n) for i in range(int(lo), int(hi) + 1)]
    m = B ** extra_depth
    step = max(1, int((b - a) * m) // 7)
    base = int(a * m)
    pts += [ex.mpq(base + 1 + i * step, m) for i in range(7) if ex.mpq(base + 1 + i * step, m) < b]
    return pts


def detect_closed_form(f, B, check_depth, max_pieces_depth=2, max_degree=3):
    """Piecewise polynomial on ``[1/B, 1]`` agreeing with ``f`` on B-adic points.

    ``f`` maps exact B-adic points to exact values.  Pieces are the intervals
    ``[j/B^D, (j+1)/B^D]`` for the smallest workable ``D``; each fit is
    checked at every depth-``check_depth`` grid point of its piece and at a
    few points a dozen digits deeper.  Returns a list of :class:`Piece` or
    ``None``.
    """
    for D in range(1, max_pieces_depth + 1):
        pieces = []
        for j in range(B ** (D - 1), B ** D):
            a, b = ex.mpq(j, B ** D), ex.mpq(j + 1, B ** D)
            found = None
            for deg in range(max_degree + 1):
                sd = D
                while B ** (sd - D) < deg + 1:
                    sd += 1
                span = B ** (sd - D)
                pts = [a + ex.mpq(i * span // max(deg, 1), B ** sd) if deg else a for i in range(deg + 1)]
                pts = sorted(set(pts))
                if len(pts) < deg + 1:
                    continue
                coeffs = _fit(pts, [f(x) for x in pts])
                ok = all(_poly_at(coeffs, x) == f(x)
                         for x in _check_points(a, b, B, max(check_depth, D + 2), check_depth + 12))
                if ok:
                    found = Piece(a, b, coeffs)
                    break
            if found is None:
                break
            pieces.append(found)
        else:
            return pieces
    return None


def verify_closed_form(pieces, f, B, check_depth):
    """``True`` when the pieces reproduce ``f`` on the checking points."""
    for pc in pieces:
        for x in _check_points(pc.a, pc.b, B, check_depth, check_depth + 12):
            if _poly_at(pc.coeffs, x) != f(x):
                return False
    return True


def _binom_poly(p):
    """Coefficients (degree 0 upwards) of ``binom(y, p)`` as a polynomial in ``y``."""
    poly = [Fraction(1)]
    for i in range(p):
        nxt = [Fraction(0)] * (len(poly) + 1)
        for k, c in enumerate(poly):
            nxt[k + 1] += c / (i + 1)
            nxt[k] -= c * i / (i + 1)
        poly = nxt
    return poly


def _J(r, c, y0, y1):
    """``int_{y0}^{y1} y^r e^(-c y) dy``."""
    if c == 0:
        return (y1 ** (r + 1) - y0 ** (r + 1)) / (r + 1)

    def prim(y):
        acc = mpmath.mpc(0)
        fall = mpmath.mpf(1)
        for i in range(r + 1):
            acc += fall * y ** (r - i) / c ** (i + 1)
            fall *= (r - i)
        return -mpmath.exp(-c * y) * acc
    return prim(y1) - prim(y0)


def fourier_closed_form(pieces, lam, p, k, B, digits=50, coef=1):
    """Exact-integration contribution of ``coef * lambda^(1-u) f binom(1-u, p)``.

    On a piece ``[a, b]`` with ``f = sum a_j x^j`` the substitution
    ``y = -log_B x`` gives ``sum_j a_j int y^r e^(-(j - sigma) y ln B) dy``
    against the coefficients of ``binom(y, p)``.
    """
    with mpmath.workdps(digits + 15):
        lnB = mpmath.log(B)
        sigma = mpmath.log(_mpf(lam) if ex.is_exact(lam) and lam > 0 else mpmath.mpc(complex(lam))) / lnB
        sigma = sigma + 2j * mpmath.pi * k / lnB
        bp = _binom_poly(p)
        total = mpmath.mpc(0)
        for pc in pieces:
            y0 = -mpmath.log(_mpf(pc.b)) / lnB
            y1 = -mpmath.log(_mpf(pc.a)) / lnB
            for j, aj in enumerate(pc.coeffs):
                if not aj:
                    continue
                # the exponent vanishes exactly when lambda = B^j and k = 0
                c = 0 if (k == 0 and ex.is_exact(lam) and lam == B ** j) else (j - sigma) * lnB
                inner = mpmath.mpc(0)
                for r, er in enumerate(bp):
                    if er:
                        inner += mpmath.mpf(er.numerator) / er.denominator * _J(r, c, y0, y1)
                total += _mpf(aj) * inner
        return _mpf(coef) * total


# -- per-term assembly ------------------------------------------------------------

@dataclass
class FourierCoefficient:
    k: int
    value: object  # mpmath.mpc
    digits: int
    method: str
    est_error: float


class FourierEngine:
    """Shared state (moment tables, Newton coefficients, closed forms) for one expansion."""

    def __init__(self, exp, closed_forms=None, detect=True):
        require_rational_phases(exp)
        self.exp = exp
        self.B = exp.radix
        self.tables = {}
        self.newton = {}
        self.closed = {}
        user = {_parse_key(k): _parse_pieces(v) for k, v in (closed_forms or {}).items()}
        meta = exp.rep.meta.get("closed_forms") or {}
        for key, pieces in meta.items():
            user.setdefault(_parse_key(key), _parse_pieces(pieces))
        needed = sorted({(pr.chain, pr.q) for t in exp.terms for pr in t.primitives})
        for key in needed:
            f = self._scalar_fn(*key)
            sol = exp.solutions[key[0]]
            if key in user:
                if not verify_closed_form(user[key], f, self.B, sol.depth):
                    raise ValidationError(f"closed form for chain {key[0]}, column {key[1]} "
                                          "disagrees with the cascade values")
                self.closed[key] = user[key]
            elif detect and sol.exact:
                pcs = detect_closed_form(f, self.B, min(sol.depth, 10))
                if pcs is not None:
                    self.closed[key] = pcs

    def _scalar_fn(self, chain, q):
        exp = self.exp
        sol = exp.solutions[chain]
        L = exp.rep.L
        return lambda x: ex.dot(L, evaluate_columns(sol, x)[q])

    def table(self, chain):
        if chain not in self.tables:
            self.tables[chain] = MomentTable.for_solution(self.exp.solutions[chain])
        return self.tables[chain]

    def newton_coefficients(self, chain, q):
        key = (chain, q)
        if key not in self.newton:
            self.newton[key] = NewtonCoefficients(self.table(chain), q)
        return self.newton[key]

    def s_point(self, lam, k):
        """``s = -log_B lambda - chi_k``."""
        lnB = mpmath.log(self.B)
        if ex.is_exact(lam) and lam > 0:
            ll = mpmath.log(_mpf(lam))
        else:
            ll = mpmath.log(mpmath.mpc(complex(lam)))
        return -ll / lnB - 2j * mpmath.pi * k / lnB

    def coefficient(self, term, k, digits=50):
        total = mpmath.mpc(0)
        err = 0.0
        methods = set()
        with mpmath.workdps(digits + 15):
            lnB = mpmath.log(self.B)
            for pr in term.primitives:
                key = (pr.chain, pr.q)
                if key in self.closed:
                    total += fourier_closed_form(self.closed[key], term.eigenvalue, pr.p, k, self.B,
                                                 digits, pr.coef)
                    methods.add("closed-form")
                elif pr.p == 0:
                    nc = self.newton_coefficients(*key)
                    mv = mellin_eval(nc, self.s_point(term.eigenvalue, k), digits)
                    total += _mpf(pr.coef) * mv.value / lnB
                    err += abs(float(pr.coef)) * 2 * mv.last_term / float(lnB)
                    methods.add("newton")
                else:
                    raise MellinDerivativeError(
                        f"primitive (chain {pr.chain}, column {pr.q}, p = {pr.p}) has no closed form: "
                        "its coefficients require derivatives of the Mellin transform")
            method = "+".join(sorted(methods)) or "closed-form"
            return FourierCoefficient(k, +total, digits, method, err)


def fourier_coefficients(term, k_range, digits=50, engine=None, closed_forms=None):
    """Coefficients ``c_k`` of ``Phi`` for ``k`` in ``k_range``."""
    engine = engine or FourierEngine(term.expansion, closed_forms)
    return [engine.coefficient(term, k, digits) for k in k_range]


def fourier_trapezoid(term, k, K, engine=None, split_closed=False):
    """Trapezoidal rule with the nodes ``j / B^K`` of ``[1/B, 1]``.

    With ``split_closed`` the primitives that have a closed form are
    integrated exactly and only the others use the trapezoidal rule.
    """
    exp = term.expansion
    B = exp.radix
    if split_closed and engine is None:
        engine = FourierEngine(exp)
    total = mpmath.mpc(0)
    with mpmath.workdps(30):
        lnB = mpmath.log(B)
        s = FourierEngine.s_point(engine, term.eigenvalue, k) if engine else None
        if s is None:
            lam = term.eigenvalue
            ll = mpmath.log(_mpf(lam)) if ex.is_exact(lam) and lam > 0 else mpmath.log(mpmath.mpc(complex(lam)))
            s = -ll / lnB - 2j * mpmath.pi * k / lnB
        h = mpmath.mpf(1) / B ** K
        for pr in term.primitives:
            key = (pr.chain, pr.q)
            if split_closed and key in engine.closed:
                total += fourier_closed_form(engine.closed[key], term.eigenvalue, pr.p, k, B, 20, pr.coef)
                continue
            sol = exp.solutions[pr.chain]
            if sol.depth < K:
                sol.extend(K)
            L = exp.rep.L
            acc = mpmath.mpc(0)
            lo, hi = B ** (K - 1), B ** K
            for j in range(lo, hi + 1):
                x = ex.mpq(j, B ** K)
                cols = sol.columns_at(j, K) if j < hi else sol.V
                fx = ex.dot(L, cols[pr.q])
                xm = _mpf(x)
                y = -mpmath.log(xm) / lnB
                g = xm ** (s - 1) * _mpf(fx) * _binom_mp(y, pr.p)
                acc += g / 2 if j in (lo, hi) else g
            total += _mpf(pr.coef) * acc * h / lnB
    return FourierCoefficient(k, total, 10, "trapezoid", float(h))


def _binom_mp(y, p):
    out = mpmath.mpf(1)
    for i in range(p):
        out *= (y - i) / (i + 1)
    return out


def _parse_key(key):
    if isinstance(key, tuple):
        return key
    a, b = str(key).split(":")
    return int(a), int(b)


def _parse_pieces(pieces):
    out = []
    for pc in pieces:
        if isinstance(pc, Piece):
            out.append(pc)
            continue
        if isinstance(pc, dict):
            a, b, coeffs = pc["a"], pc["b"], pc["coeffs"]
        else:
            a, b, coeffs = pc
        out.append(Piece(ex.to_rational(a), ex.to_rational(b), [ex.to_rational(c) for c in coeffs]))
    if not out:
        raise InputError("empty closed form")
    return out


def truncated_series(coeffs, t):
    """``sum_k c_k e^(2 pi i k t)`` over the supplied coefficients (and conjugates for k > 0)."""
    total = mpmath.mpc(0)
    for c in coeffs:
        total += c.value * mpmath.exp(2j * mpmath.pi * c.k * t)
        if c.k > 0:
            total += mpmath.conj(c.value) * mpmath.exp(-2j * mpmath.pi * c.k * t)
    return total
