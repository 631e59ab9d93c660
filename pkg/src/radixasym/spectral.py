"""Spectral analysis of ``Q`` and bounds on the joint spectral radius.

The Jordan decomposition is exact whenever every eigenvalue of ``Q`` is
rational: roots come from the rational root theorem applied to the exact
characteristic polynomial and chains from kernels of ``(Q - lambda I)^k``.
A numerical fallback exists for the remaining cases; everything it produces
is flagged ``exact=False``.
"""

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from sympy import divisors

from . import exact as ex
from .errors import (EnumerationGuardError, IllConditionedError, InputError,
                     IrrationalEigenvalueError, ValidationError)

JSR_GUARD = 2 ** 24
NORMS = ("1", "inf", "2")


# -- eigenvalues ------------------------------------------------------------

@dataclass(frozen=True)
class Eigenvalue:
    """``lambda = rho e^{i theta}``; ``value`` is an mpq when ``exact``."""

    value: object
    exact: bool = True
    error: float = 0.0

    @property
    def modulus(self) -> float:
        return float(abs(self.value)) if self.exact else abs(complex(self.value))

    @property
    def phase(self) -> float:
        if self.exact:
            return math.pi if self.value < 0 else 0.0
        return cmath.phase(complex(self.value))

    def __complex__(self):
        return complex(float(self.value)) if self.exact else complex(self.value)

    def __str__(self):
        if self.exact:
            return ex.format_rational(self.value)
        z = complex(self.value)
        if abs(z.imag) <= self.error:
            return f"{z.real:.12g}"
        return f"{z.real:.12g}{z.imag:+.12g}i"


@dataclass
class JordanChain:
    """Generalized eigenvectors with ``Q V^(j) = lambda V^(j) + V^(j-1)``."""

    eigenvalue: Eigenvalue
    vectors: list

    @property
    def size(self) -> int:
        return len(self.vectors)

    def cell(self):
        """The ``size x size`` Jordan cell ``J`` (upper bidiagonal)."""
        lam = self.eigenvalue.value
        one = lam * 0 + 1
        zero = lam * 0
        n = self.size
        return [[lam if i == j else (one if j == i + 1 else zero) for j in range(n)]
                for i in range(n)]


@dataclass
class JordanDecomposition:
    chains: list
    P: list
    Lambda: list
    exact: bool = True
    residual: float = 0.0

    @property
    def dim(self):
        return len(self.P)

    @property
    def eigenvalues(self):
        """Eigenvalues with algebraic multiplicity, in chain order."""
        return [c.eigenvalue for c in self.chains for _ in c.vectors]

    def offsets(self):
        out, k = [], 0
        for c in self.chains:
            out.append(k)
            k += c.size
        return out

    def split(self, gamma):
        """Cut a coordinate vector into per-chain pieces."""
        return [list(gamma[o:o + c.size]) for o, c in zip(self.offsets(), self.chains)]


def char_poly(Q):
    """Monic characteristic polynomial, coefficients from degree 0 upwards.

    Faddeev-LeVerrier recursion; exact for rational input.
    """
    n = len(Q)
    if n == 0:
        return [ex.ONE]
    one = Q[0][0] * 0 + 1
    zero = one * 0
    coeffs = [zero] * n + [one]
    M = ex.zeros(n, n, zero)
    for k in range(1, n + 1):
        AM = ex.mat_mul(Q, M)
        M = [[AM[i][j] + (coeffs[n - k + 1] if i == j else zero) for j in range(n)] for i in range(n)]
        AM = ex.mat_mul(Q, M)
        tr = sum((AM[i][i] for i in range(n)), zero)
        coeffs[n - k] = -tr / k
    return coeffs


def poly_eval(coeffs, x):
    acc = x * 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _deflate(coeffs, r):
    """Divide by ``(x - r)``; returns ``(quotient, remainder)``."""
    n = len(coeffs) - 1
    q = [None] * n
    acc = coeffs[n]
    for i in range(n - 1, -1, -1):
        q[i] = acc
        acc = coeffs[i] + acc * r
    return q, acc


def rational_roots(coeffs):
    """Rational roots with multiplicities and the remaining cofactor.

    Returns ``([(root, multiplicity), ...], cofactor)`` with roots in
    decreasing order.
    """
    coeffs = [ex.to_rational(c) for c in coeffs]
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    found = []
    zero_mult = 0
    while len(coeffs) > 1 and coeffs[0] == 0:
        coeffs = coeffs[1:]
        zero_mult += 1
    if zero_mult:
        found.append((ex.ZERO, zero_mult))
    if len(coeffs) > 1:
        den = 1
        for c in coeffs:
            den = den * int(c.denominator) // math.gcd(den, int(c.denominator))
        ints = [int(c * den) for c in coeffs]
        cands = set()
        for p in divisors(abs(ints[0])):
            for q in divisors(abs(ints[-1])):
                cands.add(ex.mpq(p, q))
                cands.add(ex.mpq(-p, q))
        for r in sorted(cands, reverse=True):
            mult = 0
            while len(coeffs) > 1:
                q, rem = _deflate(coeffs, r)
                if rem != 0:
                    break
                coeffs = q
                mult += 1
            if mult:
                found.append((r, mult))
    found.sort(key=lambda t: t[0], reverse=True)
    return found, coeffs


def _order_key(chain):
    z = complex(chain.eigenvalue)
    return (-round(abs(z), 12), -round(z.real, 12), -chain.size, -round(z.imag, 12))


def _exact_chains(Q, lam, mult):
    d = len(Q)
    N = ex.mat_sub(Q, ex.mat_scale(lam, ex.identity(d)))
    kernels = [[]]
    Nk = ex.identity(d)
    while len(kernels[-1]) < mult:
        Nk = ex.mat_mul(Nk, N)
        kernels.append(ex.nullspace(Nk, d))
        if len(kernels[-1]) == len(kernels[-2]):
            raise ValidationError(f"kernel growth stalled at eigenvalue {lam}")
    p = len(kernels) - 1
    # chains of size >= s: dim ker N^s - dim ker N^{s-1}
    at_least = [0] + [len(kernels[s]) - len(kernels[s - 1]) for s in range(1, p + 1)] + [0]
    chains = []  # lists of vectors, top first
    for s in range(p, 0, -1):
        need = at_least[s] - at_least[s + 1]
        if not need:
            continue
        eb = ex.EchelonBasis(d)
        for v in kernels[s - 1]:
            eb.add(v)
        for top_chain in chains:
            # vector of a longer chain sitting at level s
            eb.add(top_chain[len(top_chain) - s])
        for v in kernels[s]:
            if need == 0:
                break
            if eb.add(v):
                chain = [v]
                for _ in range(s - 1):
                    chain.append(ex.mat_vec(N, chain[-1]))
                chains.append(chain)
                need -= 1
        if need:
            raise ValidationError(f"could not complete Jordan chains at eigenvalue {lam}")
    ev = Eigenvalue(lam)
    return [JordanChain(ev, list(reversed(c))) for c in chains]


def _assemble(chains, exact_mode):
    cols = [v for c in chains for v in c.vectors]
    d = len(cols)
    P = ex.from_columns(cols, d)
    if exact_mode:
        zero, one = ex.ZERO, ex.ONE
    else:
        zero, one = 0j, 1 + 0j
    Lam = ex.zeros(d, d, zero)
    k = 0
    for c in chains:
        lam = c.eigenvalue.value if exact_mode else complex(c.eigenvalue)
        for j in range(c.size):
            Lam[k + j][k + j] = lam
            if j:
                Lam[k + j - 1][k + j] = one
        k += c.size
    return P, Lam


def _numeric_eigvecs(Qf, mu, count, tol):
    d = Qf.shape[0]
    _, s, vh = np.linalg.svd(Qf - mu * np.eye(d))
    scale = max(1.0, float(s[0]) if len(s) else 1.0)
    null = int(np.sum(s <= tol * scale * 1e3))
    if null < count:
        raise IllConditionedError(
            f"eigenvalue {mu:.6g} has multiplicity {count} but a {null}-dimensional "
            "eigenspace; numerical Jordan chains are not supported")
    return [vh[-i - 1].conj() for i in range(count)]


def _cluster(values, tol):
    groups = []
    for z in sorted(values, key=lambda z: (-abs(z), -z.real, -z.imag)):
        for g in groups:
            if abs(g[0] - z) <= tol * max(1.0, abs(z)):
                g.append(z)
                break
        else:
            groups.append([z])
    return groups


def _numeric_chains(Qf, values, tol, clusters_allowed=True):
    chains = []
    for g in _cluster(values, tol):
        if len(g) > 1 and not clusters_allowed:
            raise IllConditionedError("eigenvalue cluster below the separation tolerance")
        mu = complex(sum(g) / len(g))
        if abs(mu.imag) <= tol:
            mu = complex(mu.real, 0.0)
        ev = Eigenvalue(mu, exact=False, error=tol)
        for v in _numeric_eigvecs(Qf, mu, len(g), tol):
            chains.append(JordanChain(ev, [list(complex(x) for x in v)]))
    return chains


def jordan_decompose(Q, numeric=False, tol=1e-9):
    """Jordan decomposition of ``Q``.

    Exact when every eigenvalue is rational.  Otherwise ``numeric=True``
    completes the basis with numerically computed eigenvectors (simple or
    semisimple eigenvalues only) and the result is flagged approximate.
    Float input always takes the numeric route.
    """
    d = len(Q)
    if d == 0:
        return JordanDecomposition([], [], [], exact=True)
    float_input = not ex.is_exact(Q[0][0])
    if float_input:
        Qf = np.array(Q, dtype=complex)
        chains = _numeric_chains(Qf, list(np.linalg.eigvals(Qf)), tol)
        roots, rest = [], None
    else:
        roots, rest = rational_roots(char_poly(Q))
        chains = []
        for lam, mult in roots:
            chains.extend(_exact_chains(Q, lam, mult))
        if len(rest) > 1:
            if not numeric:
                raise IrrationalEigenvalueError(
                    f"characteristic polynomial has a factor of degree {len(rest) - 1} "
                    "without rational roots (pass numeric=True for the approximate path)")
            Qf = np.array([[float(a) for a in row] for row in Q], dtype=complex)
            extra = list(np.roots([float(c) for c in reversed(rest)]))
            chains.extend(_numeric_chains(Qf, extra, tol, clusters_allowed=False))
    chains.sort(key=_order_key)
    exact_mode = all(c.eigenvalue.exact for c in chains)
    if not exact_mode:
        for c in chains:
            c.vectors = [[complex(float(x)) if ex.is_exact(x) else complex(x) for x in v]
                         for v in c.vectors]
    P, Lam = _assemble(chains, exact_mode)
    jd = JordanDecomposition(chains, P, Lam, exact=exact_mode)
    _check(Q, jd, tol)
    return jd


def _check(Q, jd, tol):
    if jd.exact:
        if ex.mat_mul(Q, jd.P) != ex.mat_mul(jd.P, jd.Lambda):
            raise ValidationError("Q P != P Lambda")
        jd.residual = 0.0
        return
    Qa = np.array(Q, dtype=complex)
    Pa = np.array(jd.P, dtype=complex)
    La = np.array(jd.Lambda, dtype=complex)
    res = float(np.max(np.abs(Qa @ Pa - Pa @ La))) if len(Pa) else 0.0
    scale = max(1.0, float(np.max(np.abs(Qa))))
    if res > tol * scale * 1e3:
        raise IllConditionedError(f"numerical Jordan residual {res:.3g} above tolerance")
    if abs(np.linalg.det(Pa)) < tol:
        raise IllConditionedError("numerical Jordan basis is close to singular")
    jd.residual = res


def jordan_from_basis(Q, P):
    """Jordan decomposition for a caller-supplied exact basis ``P``.

    ``P^{-1} Q P`` must be a Jordan matrix; chains are the runs of
    consecutive columns joined by superdiagonal ones, in the given order.
    """
    d = len(Q)
    P = [[ex.to_rational(a) for a in row] for row in P]
    if len(P) != d or any(len(row) != d for row in P):
        raise InputError(f"basis must be {d}x{d}")
    try:
        Pinv = ex.inverse(P)
    except ZeroDivisionError as exc:
        raise InputError("supplied basis is singular") from exc
    Lam = ex.mat_mul(Pinv, ex.mat_mul(Q, P))
    chains = []
    i = 0
    while i < d:
        lam = Lam[i][i]
        j = i
        while j + 1 < d and Lam[j][j + 1] == 1 and Lam[j + 1][j + 1] == lam:
            j += 1
        vecs = [ex.column(P, k) for k in range(i, j + 1)]
        chains.append(JordanChain(Eigenvalue(lam), vecs))
        i = j + 1
    Pc, Lc = _assemble(chains, True)
    if Lc != Lam:
        raise ValidationError("supplied basis does not bring Q to Jordan form")
    jd = JordanDecomposition(chains, P, Lam, exact=True)
    _check(Q, jd, 0.0)
    return jd


def decompose_C(jd, C):
    """Coordinates ``gamma`` of ``C`` over the Jordan basis (``P gamma = C``)."""
    if jd.dim == 0:
        return []
    if jd.exact:
        try:
            return ex.solve(jd.P, [ex.to_rational(c) for c in C])
        except ZeroDivisionError as exc:
            raise ValidationError("Jordan basis is singular") from exc
    g = np.linalg.solve(np.array(jd.P, dtype=complex), np.array([complex(c) for c in C]))
    return [complex(x) for x in g]


def chain_power_combination(chain, K):
    """``Q^K V^(nu-1)`` written over the chain: coefficients of ``V^(0..nu-1)``.

    Coefficient of ``V^(j)`` is ``binom(K, nu-1-j) lambda^(K-nu+1+j)``.
    """
    lam = chain.eigenvalue.value
    nu = chain.size
    out = []
    for j in range(nu):
        ell = nu - 1 - j
        if ell > K:
            out.append(lam * 0)
        else:
            out.append(math.comb(K, ell) * lam ** (K - ell))
    return out


# -- joint spectral radius ---------------------------------------------------

@dataclass
class FinitenessWitness:
    norm_id: str
    T: int
    word: list
    rho: float
    exact: bool


@dataclass
class JsrBounds:
    """``lower <= rho_* <= upper`` from words of length ``T``.

    ``max_norm`` is ``max ||A_w||`` itself (exact for the 1- and inf-norms
    of an exact representation); ``upper = max_norm^(1/T)``.
    """

    T: int
    norm_id: str
    max_norm: object
    upper: float
    lower: float
    lower_word: list = field(default_factory=list)
    finiteness_witness: Optional[FinitenessWitness] = None

    @property
    def rho_star(self):
        """``rho_*`` when witnessed, else ``None``."""
        return self.finiteness_witness.rho if self.finiteness_witness else None


def matrix_norm(M, norm_id):
    if norm_id == "1":
        return ex.norm1(M)
    if norm_id == "inf":
        return ex.norm_inf(M)
    if norm_id == "2":
        if not M:
            return 0.0
        return float(np.linalg.norm(np.array(M, dtype=float), 2))
    raise InputError(f"unknown norm {norm_id!r} (choose from {', '.join(NORMS)})")


def spectral_radius(M):
    if not M:
        return 0.0
    return float(max(abs(np.linalg.eigvals(np.array(M, dtype=complex)))))


def _key(M):
    return tuple(tuple(row) for row in M)


class _WordSearch:
    """Breadth-first products with deduplication and norm pruning."""

    def __init__(self, rep, norm_id, guard):
        self.rep = rep
        self.norm_id = norm_id
        self.guard = guard
        self.best = {0: matrix_norm(rep.identity(), norm_id) if rep.dim else 0}

    def max_norm(self, T):
        if T not in self.best:
            self.search(T)
        return self.best[T]

    def search(self, T):
        rep = self.rep
        if rep.radix ** T > self.guard:
            raise EnumerationGuardError(f"B^T = {rep.radix}^{T} exceeds the guard {self.guard}")
        nrm = lambda M: matrix_norm(M, self.norm_id)  # noqa: E731
        if rep.dim == 0:
            return 0, [([], [])]
        for t in range(1, T):
            self.max_norm(t)
        incumbent = max(nrm(ex.mat_pow(A, T)) for A in rep.A)
        level = {_key(rep.identity()): ([], rep.identity())}
        for t in range(1, T + 1):
            nxt = {}
            tail = self.best[T - t] if t < T else None
            for word, M in level.values():
                for b, A in enumerate(rep.A):
                    P = ex.mat_mul(M, A)
                    k = _key(P)
                    if k in nxt:
                        continue
                    n = nrm(P)
                    if tail is not None:
                        if n * tail < incumbent:
                            continue
                    elif n > incumbent:
                        incumbent = n
                    nxt[k] = (word + [b], P)
            level = nxt
        survivors = [(w, M) for w, M in level.values()]
        self.best[T] = incumbent
        return incumbent, survivors


def _root(x, T):
    x = float(x)
    return x ** (1.0 / T) if x > 0 else 0.0


def _witness_exact(M, c):
    d = len(M)
    for s in (c, -c):
        if ex.det(ex.mat_sub(M, ex.mat_scale(s, ex.identity(d)))) == 0:
            return True
    return False


def jsr_bounds(rep, T, norm_id="1", guard=JSR_GUARD, search=None):
    """Bounds on the joint spectral radius from words of length ``T``.

    ``search`` lets successive calls share the table of maximal norms of
    shorter words used for pruning.
    """
    if T < 1:
        raise InputError("word length T must be >= 1")
    if search is None:
        search = _WordSearch(rep, norm_id, guard)
    top, survivors = search.search(T)
    lower, lower_word, witness = 0.0, [], None
    exact_norm = rep.exact and norm_id in ("1", "inf")
    scale = max(float(top), 1e-300)
    for w, M in survivors:
        rho = spectral_radius(M)
        if rho > lower:
            lower, lower_word = rho, w
        if witness is None and top and M and abs(rho - float(top)) <= 1e-10 * scale:
            certified = exact_norm and _witness_exact(M, top)
            witness = FinitenessWitness(norm_id, T, w, _root(top, T), certified)
    if not top:
        witness = FinitenessWitness(norm_id, T, survivors[0][0] if survivors else [], 0.0, True)
    upper = _root(top, T)
    lower = _root(lower, T)
    if witness is not None:
        lower = upper
    return JsrBounds(T, norm_id, top, upper, lower, lower_word, witness)


def finiteness_check(rep, T, norm_id="1", guard=JSR_GUARD):
    """A word of length ``T`` whose spectral radius meets the norm bound, if any.

    Absence is not a disproof of the finiteness property.
    """
    return jsr_bounds(rep, T, norm_id, guard).finiteness_witness


def best_bounds(rep, T_max, norms=("1", "inf"), guard=JSR_GUARD):
    """Tightest bounds over ``T = 1..T_max`` and the given norms.

    A finiteness witness ends the search early.
    """
    best = None
    searches = {n: _WordSearch(rep, n, guard) for n in norms}
    for T in range(1, T_max + 1):
        if rep.radix ** T > guard:
            break
        for norm_id in norms:
            b = jsr_bounds(rep, T, norm_id, guard, searches[norm_id])
            if b.finiteness_witness is not None:
                return b
            if best is None or b.upper < best.upper:
                lower = max(best.lower, b.lower) if best else b.lower
                best = b
                best.lower = lower
            else:
                best.lower = max(best.lower, b.lower)
    return best


# -- classification ----------------------------------------------------------

@dataclass
class EigenClassification:
    """Chains that enter the expansion (``lambda_gt``) and the others.

    Entries are ``(index, chain, gamma_piece)``.  ``error_exponent`` is the
    base-``B`` logarithm of the error-term growth rate and ``log_power`` the
    extra ``log^m N`` factor of the improved error term.
    """

    lambda_gt: list
    lambda_le: list
    r: float
    error_exponent: float
    improved: bool = False
    log_power: int = 0
    warning: str = ""


def _log(x, B):
    return math.log(x) / math.log(B) if x > 0 else float("-inf")


def default_r(jd, gamma, bounds):
    """``rho_*`` when witnessed, else the log-midpoint between the upper bound
    and the smallest modulus above it."""
    if bounds.finiteness_witness is not None:
        return bounds.finiteness_witness.rho
    mods = [c.eigenvalue.modulus for c, g in zip(jd.chains, jd.split(gamma))
            if any(g) and c.eigenvalue.modulus > bounds.upper]
    if not mods or bounds.upper <= 0:
        return bounds.upper
    return math.sqrt(bounds.upper * min(mods))


def classify_eigenvalues(jd, gamma, bounds, r=None, radix=2):
    """Sort chains into the expansion part and the error part.

    A chain is retained when its piece of ``gamma`` is nonzero and its
    modulus exceeds ``r``.  With a finiteness witness and ``r = rho_*`` the
    error term is ``N^{log_B rho_*} log^m N``, ``m`` being the largest cell at
    modulus ``rho_*`` among the chains that ``C`` involves.
    """
    if r is None:
        r = default_r(jd, gamma, bounds)
    r = float(r)
    gt, le = [], []
    for i, (c, g) in enumerate(zip(jd.chains, jd.split(gamma))):
        if not any(g):
            continue
        (gt if c.eigenvalue.modulus > r * (1 + 1e-12) else le).append((i, c, g))
    w = bounds.finiteness_witness
    improved = w is not None and abs(r - w.rho) <= 1e-12 * max(1.0, w.rho)
    exponent = _log(r, radix)
    log_power = 0
    if improved:
        at = [c.size for _, c, _ in le if abs(c.eigenvalue.modulus - w.rho) <= 1e-9 * max(1.0, w.rho)]
        log_power = max(at, default=0)
    warning = ""
    if not gt:
        warning = "no eigenvalue above r: the expansion is empty"
    return EigenClassification(gt, le, r, exponent, improved, log_power, warning)
