"""Asymptotic expansion of partial sums from a linear representation.

With ``B^K <= N < B^(K+1)`` and ``x = N / B^(K+1)`` the partial sum is
``s_N = L Sigma_{K+1}(x)`` for a zero-insensitive representation.  Each
Jordan vector ``V^(j)`` of a retained chain contributes

    sum_{l <= j} binom(K+1, l) lambda^(K+1-l) F^(j-l)(x)

to ``Sigma_{K+1}(x)``.  Writing ``t = log_B N``, ``K + 1 = t + 1 - {t}`` and
``x = B^({t}-1)``, the Chu-Vandermonde identity splits
``binom(t + 1 - {t}, l)`` over ``binom(t, m) binom(1 - {t}, l - m)``; each
piece is a *primitive*

    coef * lambda^(1-{t}) * L F^(q)(B^({t}-1)) * binom(1-{t}, p).

A term of the expansion collects the primitives sharing ``(lambda, m)``.
"""

import cmath
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import exact as ex
from .dilation import cascade_solve, evaluate_columns, holder_estimate
from .errors import (InputError, IrrationalEigenvalueError, NotZeroInsensitiveError,
                     UnsupportedError)
from .linrep import digits, is_zero_insensitive, partial_sum_via_series, q_matrix
from .spectral import (best_bounds, classify_eigenvalues, decompose_C, jordan_decompose,
                       jordan_from_basis, jsr_bounds)

DEFAULT_DEPTH = 10


@dataclass(frozen=True)
class Primitive:
    """``coef * lambda^(1-u) * L F^(q)(B^(u-1)) * binom(1-u, p)`` for chain ``chain``."""

    chain: int
    q: int
    p: int
    coef: object


@dataclass
class ExpansionTerm:
    """``N^(log_B rho) binom(log_B N, m) e^(i theta log_B N) Phi(log_B N)``."""

    eigenvalue: object
    rho: float
    theta: float
    m: int
    primitives: list
    index: int = 0
    phi_index: int = 0
    constant: object = None  # exact value when Phi is constant
    expansion: object = field(default=None, repr=False)

    @property
    def exponent(self):
        return math.log(self.rho) / math.log(self.expansion.radix)

    def phi(self, t, depth=None):
        return phi_eval(self, t, depth).value


@dataclass
class PhiValue:
    value: complex
    error_bound: float
    x: object  # B-adic point where F was evaluated


class AsymptoticExpansion:
    """Terms, error term and the data needed to evaluate them."""

    def __init__(self, rep, terms, classification, bounds, jd, gamma, solutions, depth):
        self.rep = rep
        self.radix = rep.radix
        self.terms = terms
        self.classification = classification
        self.bounds = bounds
        self.jd = jd
        self.gamma = gamma
        self.solutions = solutions
        self.depth = depth
        self._holder = {}
        for i, t in enumerate(terms):
            t.index = i
            t.expansion = self

    @property
    def error_exponent(self):
        return self.classification.error_exponent

    @property
    def log_power(self):
        return self.classification.log_power

    @property
    def r(self):
        return self.classification.r

    def scalar(self, chain, q, x):
        """``L F^(q)(x)`` for a retained chain at an exact B-adic point."""
        cols = evaluate_columns(self.solutions[chain], x)
        return ex.dot(self.rep.L, cols[q])

    def holder_constant(self, chain, q):
        """Hölder constant of ``L F^(q)`` at the exponent ``log_B(rho / r)``."""
        key = (chain, q)
        if key not in self._holder:
            sol = self.solutions[chain]
            rho = abs(complex(sol.eigenvalue))
            alpha = min(1.0, max(1e-3, math.log(rho / self.r) / math.log(self.radix))) if self.r > 0 else 1.0
            L = self.rep.L
            self._holder[key] = holder_estimate(sol, alpha, functional=lambda cols: ex.dot(L, cols[q]))
        return self._holder[key]

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    def __str__(self):
        return render_text(self)


def _binom_real(y, p):
    out = 1.0
    for i in range(p):
        out *= (y - i) / (i + 1)
    return out


def _lam_power(lam, e):
    """``lambda^e`` on the principal branch (``e`` real)."""
    z = complex(lam)
    if z.imag == 0 and z.real > 0:
        return complex(z.real ** e)
    return cmath.exp(e * cmath.log(z))


def _to_float(v):
    if ex.is_exact(v):
        return float(v)
    return complex(v) if isinstance(v, complex) else float(v)


def phi_at(term, x):
    """``Phi`` at the phase ``u = 1 + log_B x`` for an exact B-adic ``x`` in ``[1/B, 1]``."""
    exp = term.expansion
    B = exp.radix
    u = 1.0 + math.log(float(x)) / math.log(B)
    total = 0j
    lp = _lam_power(term.eigenvalue, 1.0 - u)
    for pr in term.primitives:
        val = _to_float(exp.scalar(pr.chain, pr.q, x))
        total += complex(_to_float(pr.coef)) * lp * val * _binom_real(1.0 - u, pr.p)
    return total


def phi_eval(term, t, depth=None):
    """``Phi(t)`` for real ``t``.

    ``F`` is read at the B-adic point nearest ``B^({t}-1)`` with ``depth``
    digits (default: the cascade depth, refined locally when larger).  The
    error bound propagates the Hölder constants of the primitives.
    """
    exp = term.expansion
    B = exp.radix
    depth = exp.depth if depth is None else depth
    u = t - math.floor(t)
    xf = B ** (u - 1.0)
    i = min(max(round(xf * B ** depth), B ** (depth - 1)), B ** depth)
    x = ex.mpq(i, B ** depth)
    if abs(float(x) - xf) <= 1e-15 * xf:
        xf = float(x)
    total = 0j
    err = 0.0
    lp = _lam_power(term.eigenvalue, 1.0 - u)
    for pr in term.primitives:
        val = _to_float(exp.scalar(pr.chain, pr.q, x))
        w = complex(_to_float(pr.coef)) * lp * _binom_real(1.0 - u, pr.p)
        total += w * val
        gap = abs(float(x) - xf)
        if gap:
            h = exp.holder_constant(pr.chain, pr.q)
            err += abs(w) * h.constant * gap ** h.alpha
    return PhiValue(total, err, x)


def phi_grid(term, depth):
    """``(x, u, Phi)`` at the B-adic points ``x = j / B^depth`` of ``[1/B, 1]``."""
    B = term.expansion.radix
    out = []
    for j in range(B ** (depth - 1), B ** depth + 1):
        x = ex.mpq(j, B ** depth)
        u = 1.0 + math.log(float(x)) / math.log(B)
        out.append((x, u, phi_at(term, x)))
    return out


def a_k_polynomial(chain, sol, K, x, j=None):
    """``sum_{l <= j} binom(K, l) lambda^(K-l) F^(j-l)(x)`` (default ``j = nu - 1``).

    The expansion of ``Sigma_K(x)`` started from ``V^(j)``; exact in exact mode.
    """
    cols = evaluate_columns(sol, x)
    j = len(cols) - 1 if j is None else j
    lam = sol.eigenvalue
    acc = [a * 0 for a in cols[0]]
    for ell in range(min(j, K) + 1):
        c = math.comb(K, ell) * lam ** (K - ell)
        acc = ex.vec_add(acc, [c * a for a in cols[j - ell]])
    return acc


def _chain_basis(rep, jordan):
    if jordan is not None:
        return jordan
    Q = q_matrix(rep)
    basis = rep.meta.get("jordan_basis")
    if basis is not None and rep.exact:
        return jordan_from_basis(Q, basis)
    return None


def _default_T(B, exact):
    T = 1
    while B ** (T + 1) <= (2 ** 10 if exact else 2 ** 8):
        T += 1
    return T


def build_expansion(rep, r=None, norm_id=None, T=None, depth=DEFAULT_DEPTH, jordan=None, numeric=False):
    """Asymptotic expansion of ``s_N = u_0 + ... + u_N``.

    Pipeline: ``Q`` -> Jordan basis (``jordan`` argument, else the
    representation's ``jordan_basis`` metadata, else computed) -> JSR bounds
    -> classification with ``r`` -> one cascade per retained chain ->
    primitives collected by ``(lambda, m)``.

    Without ``norm_id``/``T`` the bounds are the tightest over ``T`` up to a
    small guard and the 1- and inf-norms (plus the 2-norm in float mode).
    """
    if not is_zero_insensitive(rep):
        raise NotZeroInsensitiveError(
            "the expansion needs a zero-insensitive representation (L A_0 = L)")
    B = rep.radix
    if rep.dim == 0:
        bounds = jsr_bounds(rep, 1, norm_id or "1")
        cls = classify_eigenvalues(jordan_decompose([]), [], bounds, r=0.0 if r is None else r, radix=B)
        cls.error_exponent = float("-inf") if r is None else cls.error_exponent
        return AsymptoticExpansion(rep, [], cls, bounds, jordan_decompose([]), [], {}, depth)
    jd = _chain_basis(rep, jordan)
    if jd is None:
        jd = jordan_decompose(q_matrix(rep), numeric=numeric)
    gamma = decompose_C(jd, rep.C)
    if norm_id is not None and T is not None:
        bounds = jsr_bounds(rep, T, norm_id)
    else:
        norms = (norm_id,) if norm_id else (("1", "inf") if rep.exact else ("2", "1", "inf"))
        bounds = best_bounds(rep, T or _default_T(B, rep.exact), norms)
    cls = classify_eigenvalues(jd, gamma, bounds, r=r, radix=B)
    solutions = {}
    groups = {}
    for idx, chain, g in cls.lambda_gt:
        ev = chain.eigenvalue
        if rep.exact and not ev.exact and not numeric:
            raise IrrationalEigenvalueError(f"retained eigenvalue {ev} is not rational")
        solutions[idx] = cascade_solve(rep, chain, depth, allow_numeric=numeric)
        lam = solutions[idx].eigenvalue
        for j, gj in enumerate(g):
            if not gj:
                continue
            for ell in range(j + 1):
                c = gj / lam ** ell
                for m in range(ell + 1):
                    key = _term_key(ev, m)
                    slot = groups.setdefault(key, (ev, lam, {}))
                    prims = slot[2]
                    pk = (idx, j - ell, ell - m)
                    prims[pk] = prims.get(pk, 0) + c
    terms = []
    for key in sorted(groups, key=lambda k: (-k[0], -k[2], k[1])):
        ev, lam, prims = groups[key]
        plist = [Primitive(i, q, p, c) for (i, q, p), c in sorted(prims.items()) if c]
        if not plist:
            continue
        terms.append(ExpansionTerm(lam, ev.modulus, ev.phase, key[2], plist))
    exp = AsymptoticExpansion(rep, terms, cls, bounds, jd, gamma, solutions, depth)
    for t in terms:
        t.constant = _detect_constant(t)
    exp.terms = [t for t in terms if t.constant is None or t.constant != 0]
    k = 0
    for i, t in enumerate(exp.terms):
        t.index = i
        if t.constant is None:
            t.phi_index = k
            k += 1
    return exp


def _term_key(ev, m):
    return (round(ev.modulus, 12), round(ev.phase, 12), m)


def _detect_constant(term, depth=6):
    """Exact constant value of ``Phi`` if it is constant on a B-adic grid, else ``None``.

    Only real terms are considered; the value must be a rational with a small
    denominator reproduced to 1e-12 at every grid point.
    """
    if term.theta != 0:
        return None
    vals = [v for (_, _, v) in phi_grid(term, min(depth, term.expansion.depth or depth))]
    v0 = vals[0]
    if any(abs(v - v0) > 1e-12 * max(1.0, abs(v0)) for v in vals) or abs(v0.imag) > 1e-12:
        return None
    fr = Fraction(v0.real).limit_denominator(10 ** 6)
    if abs(float(fr) - v0.real) > 1e-12 * max(1.0, abs(v0.real)):
        return None
    return ex.to_rational(fr)


# -- evaluation ---------------------------------------------------------------

def _split(N, B):
    K = len(digits(N, B)) - 1
    return K, ex.mpq(N, B ** (K + 1))


def term_value(term, N, depth=None):
    """One term at ``N``; ``F`` is evaluated exactly at ``x = N / B^(K+1)``
    unless ``depth`` is given, in which case the nearest depth-``depth``
    grid point is used."""
    B = term.expansion.radix
    t = math.log(N) / math.log(B)
    K, x = _split(N, B)
    if depth is None:
        phi = phi_at(term, x)
    else:
        phi = phi_eval(term, t, depth).value
    scale = _lam_power(term.eigenvalue, t)
    return scale * _binom_real(t, term.m) * phi


def expansion_eval(exp, N, depth=None):
    """``sum over terms`` at integer ``N >= 1`` (complex; real part for real data)."""
    if N < 1:
        raise InputError("expansion_eval needs N >= 1")
    return sum((term_value(t, N, depth) for t in exp.terms), 0j)


def expansion_exact(exp, N):
    """Exact value of the retained part ``L sum_V gamma_V A_{K+1}(x)`` at ``N``.

    Equals :func:`expansion_eval` up to rounding and is exact whenever the
    retained eigenvalues and the representation are rational.
    """
    rep = exp.rep
    K, x = _split(N, rep.radix)
    total = rep.zero()
    pieces = exp.jd.split(exp.gamma)
    for idx, sol in exp.solutions.items():
        for j, gj in enumerate(pieces[idx]):
            if gj:
                v = a_k_polynomial(exp.jd.chains[idx], sol, K + 1, x, j)
                total = total + gj * ex.dot(rep.L, v)
    return total


@dataclass
class ResidualRow:
    N: int
    s_N: object
    predicted: float
    residual: float
    normalized: float


def residual_report(rep, exp, N_list, depth=None, exponent=None):
    """Rows ``(N, s_N, predicted, residual, residual / N^e)``.

    ``e`` defaults to the expansion's error exponent (with its log power).
    """
    e = exp.error_exponent if exponent is None else exponent
    B = rep.radix
    rows = []
    for N in N_list:
        s = partial_sum_via_series(rep, N)
        pred = expansion_eval(exp, N, depth).real
        res = float(s) - pred
        scale = N ** e if math.isfinite(e) else 1.0
        if exponent is None and exp.log_power:
            scale *= max(1.0, math.log(N) / math.log(B)) ** exp.log_power
        rows.append(ResidualRow(N, s, pred, res, abs(res) / scale if scale else float("inf")))
    return rows


# -- rendering ------------------------------------------------------------------

def _log_name(B):
    return f"log{B}"


def _power_text(rho, B):
    """``N^a`` with ``a = log_B rho`` rendered exactly when ``rho^q = B^p``."""
    if rho == 0:
        return "0"
    a = math.log(rho) / math.log(B)
    fr = Fraction(a).limit_denominator(12)
    if abs(float(fr) - a) < 1e-12:
        if fr == 0:
            return ""
        if fr == 1:
            return "N"
        return f"N^({fr})" if fr.denominator != 1 else f"N^{fr.numerator}"
    return f"N^{a:.6g}"


def _coef_text(c):
    return ex.format_rational(c)


def term_text(term):
    B = term.expansion.radix
    parts = []
    if term.constant is not None:
        parts.append(_coef_text(term.constant))
    power = _power_text(term.rho, B)
    if power:
        parts.append(power)
    if term.m == 1:
        parts.append(f"{_log_name(B)}(N)")
    elif term.m > 1:
        parts.append(f"binom({_log_name(B)}(N), {term.m})")
    if term.theta:
        parts.append(f"exp(i*{term.theta:.12g}*{_log_name(B)}(N))")
    if term.constant is None:
        parts.append(f"Phi_{term.phi_index}({_log_name(B)}(N))")
    return " * ".join(parts)


def error_text(exp):
    B = exp.radix
    e = exp.error_exponent
    if not math.isfinite(e):
        return "O(0)"
    fr = Fraction(e).limit_denominator(12)
    if abs(float(fr) - e) < 1e-12:
        base = "1" if fr == 0 else ("N" if fr == 1 else f"N^({fr})")
    else:
        base = f"N^{e:.3f}"
    if exp.log_power:
        logs = f"{_log_name(B)}(N)" + (f"^{exp.log_power}" if exp.log_power > 1 else "")
        base = logs if base == "1" else f"{base} * {logs}"
    return f"O({base})"


def render_text(exp):
    parts = [term_text(t) for t in exp.terms]
    parts.append(error_text(exp))
    return " + ".join(parts)


def _json_value(v):
    if ex.is_exact(v):
        return ex.format_rational(v)
    z = complex(v)
    return [z.real, z.imag] if z.imag else z.real


def to_json(exp):
    """JSON-ready description of the expansion."""
    b = exp.bounds
    return {
        "text": render_text(exp),
        "radix": exp.radix,
        "terms": [
            {
                "index": t.index,
                "phi_index": None if t.constant is not None else t.phi_index,
                "eigenvalue": _json_value(t.eigenvalue),
                "rho": t.rho,
                "theta": t.theta,
                "exponent": t.exponent,
                "m": t.m,
                "constant": None if t.constant is None else ex.format_rational(t.constant),
                "primitives": [{"chain": p.chain, "q": p.q, "p": p.p, "coef": _json_value(p.coef)}
                               for p in t.primitives],
            }
            for t in exp.terms
        ],
        "error": {
            "exponent": exp.error_exponent if math.isfinite(exp.error_exponent) else None,
            "log_power": exp.log_power,
            "improved": exp.classification.improved,
            "r": exp.r,
        },
        "jsr": {
            "T": b.T,
            "norm": b.norm_id,
            "upper": b.upper,
            "lower": b.lower,
            "witness": None if b.finiteness_witness is None else {
                "T": b.finiteness_witness.T,
                "norm": b.finiteness_witness.norm_id,
                "word": b.finiteness_witness.word,
                "rho": b.finiteness_witness.rho,
                "certified": b.finiteness_witness.exact,
            },
        },
        "gamma": [_json_value(g) for g in exp.gamma],
        "eigenvalues": [_json_value(c.eigenvalue.value) for c in exp.jd.chains],
        "chain_sizes": [c.size for c in exp.jd.chains],
        "warning": exp.classification.warning,
    }


def dumps(exp):
    return json.dumps(to_json(exp), indent=1, sort_keys=True)


def require_rational_phases(exp):
    """Fourier routines handle real eigenvalues only."""
    for t in exp.terms:
        if t.theta not in (0.0, math.pi):
            raise UnsupportedError("complex eigenvalues are outside the Fourier routines")
