"""Linear representations of radix-rational sequences.

A representation ``(L, (A_b), C)`` of radix ``B`` defines

    u_n = L A_{n_{l-1}} ... A_{n_1} A_{n_0} C

where ``n_{l-1} ... n_0`` are the base-``B`` digits of ``n``, most
significant first.  The empty word (``n = 0``) gives ``L C``.

Besides evaluation this module holds the brute-force sums used as oracles
everywhere else: the partial sums ``s_N`` and the vector-valued sums

    Sigma_K(x) = sum over words w of length K with (0.w)_B <= x of A_w V.
"""

import json
import math
from collections import deque
from numbers import Integral

from . import exact as ex
from .errors import (
    DimensionCapError,
    EnumerationGuardError,
    InputError,
    MantissaError,
    RadixMismatchError,
    VerificationError,
)

SIGMA_GUARD = 2 ** 20


class DigitWord(tuple):
    """A tuple of base-``radix`` digits, most significant first."""

    def __new__(cls, digits, radix):
        digits = tuple(int(d) for d in digits)
        if radix < 2:
            raise InputError(f"radix must be >= 2, got {radix}")
        for d in digits:
            if not 0 <= d < radix:
                raise InputError(f"digit {d} out of range for radix {radix}")
        self = super().__new__(cls, digits)
        self.radix = radix
        return self

    def value(self):
        n = 0
        for d in self:
            n = n * self.radix + d
        return n

    def __repr__(self):
        return f"DigitWord({list(self)!r}, radix={self.radix})"


def digits(n, B):
    """Base-``B`` expansion of ``n``; ``0`` maps to the empty word."""
    if n < 0:
        raise InputError("digits() needs a nonnegative integer")
    if B < 2:
        raise InputError(f"radix must be >= 2, got {B}")
    out = []
    while n:
        n, r = divmod(n, B)
        out.append(r)
    out.reverse()
    return DigitWord(out, B)


def _coerce_entry(x, exact):
    if exact:
        return ex.to_rational(x)
    return float(x)


def _has_float(obj):
    if isinstance(obj, (list, tuple)):
        return any(_has_float(o) for o in obj)
    return isinstance(obj, float)


class LinearRepresentation:
    """Row vector ``L``, matrices ``A[0..B-1]`` and column vector ``C``.

    Entries are exact rationals unless some input entry is a float, in
    which case the whole representation is stored in float mode
    (``rep.exact is False``).  ``meta`` carries optional, pass-through data
    such as a preferred Jordan basis.
    """

    def __init__(self, L, A, C, radix=None, name="", meta=None):
        if radix is None:
            radix = len(A)
        if radix < 2:
            raise InputError(f"radix must be >= 2, got {radix}")
        if len(A) != radix:
            raise InputError(f"expected {radix} matrices, got {len(A)}")
        d = len(L)
        if len(C) != d:
            raise InputError(f"L has size {d} but C has size {len(C)}")
        for b, M in enumerate(A):
            if len(M) != d or any(len(row) != d for row in M):
                raise InputError(f"A_{b} is not {d}x{d}")
        self.exact = not _has_float([L, A, C])
        conv = lambda x: _coerce_entry(x, self.exact)  # noqa: E731
        self.radix = int(radix)
        self.L = [conv(x) for x in L]
        self.A = [[[conv(x) for x in row] for row in M] for M in A]
        self.C = [conv(x) for x in C]
        self.name = name
        self.meta = dict(meta or {})

    @property
    def dim(self):
        return len(self.L)

    def zero(self):
        return ex.ZERO if self.exact else 0.0

    def one(self):
        return ex.ONE if self.exact else 1.0

    def identity(self):
        return ex.identity(self.dim, one=self.one(), zero=self.zero())

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        mode = "exact" if self.exact else "float"
        return f"<LinearRepresentation{label} radix={self.radix} dim={self.dim} {mode}>"

    def __eq__(self, other):
        if not isinstance(other, LinearRepresentation):
            return NotImplemented
        return (self.radix, self.L, self.A, self.C) == (other.radix, other.L, other.A, other.C)

    def word_matrix(self, word):
        """``A_w = A_{w_1} ... A_{w_l}``."""
        M = self.identity()
        for b in word:
            M = ex.mat_mul(M, self.A[b])
        return M


def _check_word(rep, w):
    radix = getattr(w, "radix", None)
    if radix is not None and radix != rep.radix:
        raise RadixMismatchError(f"word has radix {radix}, representation has radix {rep.radix}")
    for d in w:
        if not 0 <= d < rep.radix:
            raise RadixMismatchError(f"digit {d} is not a radix-{rep.radix} digit")


def eval_word(rep, w):
    """``L A_{w_1} ... A_{w_l} C`` with ``w_1`` the most significant digit."""
    _check_word(rep, w)
    row = list(rep.L)
    for b in w:
        row = ex.vec_mat(row, rep.A[b])
    return ex.dot(row, rep.C) if rep.dim else rep.zero()


def eval_seq(rep, n):
    return eval_word(rep, digits(n, rep.radix))


def eval_range(rep, n_max):
    """``[u_0, ..., u_{n_max}]`` sharing prefix products.

    Uses ``L A_{w b} = (L A_w) A_b``: the row vector of ``n`` is the row
    vector of ``n // B`` times ``A_{n mod B}``, with the empty word at 0.
    """
    if rep.dim == 0:
        return [rep.zero()] * (n_max + 1)
    B = rep.radix
    rows = [list(rep.L)]
    out = [ex.dot(rep.L, rep.C)]
    for n in range(1, n_max + 1):
        q, b = divmod(n, B)
        row = ex.vec_mat(rows[q], rep.A[b])
        rows.append(row)
        out.append(ex.dot(row, rep.C))
    return out


def is_zero_insensitive(rep):
    """``L A_0 == L`` exactly (float mode: exact float equality)."""
    if rep.dim == 0:
        return True
    return ex.vec_mat(rep.L, rep.A[0]) == rep.L


def q_matrix(rep):
    """``Q = A_0 + ... + A_{B-1}``."""
    Q = [list(row) for row in rep.A[0]]
    for M in rep.A[1:]:
        Q = ex.mat_add(Q, M)
    return Q


def partial_sum_direct(rep, N):
    """``s_N = u_0 + ... + u_N`` by brute force."""
    total = rep.zero()
    for u in eval_range(rep, N):
        total = total + u
    return total


def partial_sums(rep, N):
    """All partial sums ``[s_0, ..., s_N]``."""
    out = []
    total = rep.zero()
    for u in eval_range(rep, N):
        total = total + u
        out.append(total)
    return out


# -- vector-valued sums -----------------------------------------------------

def _threshold(x, B, K):
    """Largest integer ``i`` with ``i / B^K <= x``, or ``None`` when every word qualifies."""
    if isinstance(x, float):
        raise InputError("sums Sigma_K need an exact abscissa (rational or mantissa word)")
    x = ex.to_rational(x)
    if x < 0:
        raise InputError("abscissa must lie in [0, 1]")
    i = math.floor(x * B ** K)
    if i >= B ** K:
        return None
    return i


def mantissa(x, B, K):
    """First ``K`` base-``B`` digits of ``x`` in ``[0, 1)`` (truncated)."""
    i = _threshold(x, B, K)
    if i is None:
        raise InputError("x = 1 has no length-K mantissa")
    ds = list(digits(i, B)) if i else []
    return DigitWord([0] * (K - len(ds)) + ds, B)


def _start_vector(rep, V):
    if V is None:
        return list(rep.C)
    if len(V) != rep.dim:
        raise InputError(f"vector of size {len(V)} for a representation of dimension {rep.dim}")
    return [_coerce_entry(v, rep.exact) if not isinstance(v, complex) else v for v in V]


def _apply_word(rep, w, V):
    v = V
    for b in reversed(w):
        v = ex.mat_vec(rep.A[b], v)
    return v


def sigma_direct(rep, V, K, x, guard=SIGMA_GUARD):
    """Brute-force ``Sigma_K(x)`` for the start vector ``V`` (``None`` means ``C``).

    ``x`` is a rational in ``[0, 1]`` or a mantissa word; only its first
    ``K`` digits matter.  All ``B^K`` words are enumerated, subject to
    ``guard``.
    """
    B = rep.radix
    if B ** K > guard:
        raise EnumerationGuardError(f"B^K = {B}^{K} exceeds the guard {guard}")
    V = _start_vector(rep, V)
    if isinstance(x, (tuple, list)):
        _check_word(rep, x)
        if len(x) < K:
            raise MantissaError(f"mantissa of length {len(x)} shorter than K = {K}")
        top = DigitWord(x[:K], B).value() if K else 0
    else:
        top = _threshold(x, B, K)
        if top is None:
            top = B ** K - 1
    total = [v * 0 for v in V]
    for i in range(top + 1):
        ds = list(digits(i, B))
        w = [0] * (K - len(ds)) + ds
        total = ex.vec_add(total, _apply_word(rep, w, V))
    return total


def _qk_vectors(rep, V, K):
    Q = q_matrix(rep)
    out = [V]
    for _ in range(K - 1):
        out.append(ex.mat_vec(Q, out[-1]))
    return Q, out


def sigma_recursive(rep, V, K, x):
    """``Sigma_K(x)`` through the digit recursion, in ``O(K)`` matrix-vector products.

    ``Sigma_{k+1}(.x_1 x_2...) = sum_{b < x_1} A_b Q^k V + A_{x_1} Sigma_k(.x_2...)``,
    unrolled from the last digit, with ``Sigma_0 = V``.
    """
    B = rep.radix
    V = _start_vector(rep, V)
    if not isinstance(x, (tuple, list)):
        if _threshold(x, B, K) is None:
            Q = q_matrix(rep)
            v = V
            for _ in range(K):
                v = ex.mat_vec(Q, v)
            return v
        x = mantissa(x, B, K)
    _check_word(rep, x)
    if len(x) < K:
        raise MantissaError(f"mantissa of length {len(x)} shorter than K = {K}")
    if K == 0:
        return list(V)
    prefix = [None] * (B + 1)
    acc = ex.mat_scale(rep.zero(), rep.A[0])
    for b in range(B):
        prefix[b] = acc
        acc = ex.mat_add(acc, rep.A[b])
    _, qv = _qk_vectors(rep, V, K)
    S = list(V)
    for i in range(1, K + 1):
        c = x[K - i]
        S = ex.vec_add(ex.mat_vec(prefix[c], qv[i - 1]), ex.mat_vec(rep.A[c], S))
    return S


def partial_sum_via_series(rep, N):
    """``s_N`` through the length-``K+1`` sum ``S_{K+1}(N / B^{K+1})``.

    For representations with ``L A_0 != L`` the boundary correction
    ``L (I - A_0) sum_{k<=K} Q^k C`` is added.
    """
    if N == 0:
        return eval_seq(rep, 0)
    if rep.dim == 0:
        return rep.zero()
    w = digits(N, rep.radix)
    K = len(w) - 1
    S = ex.dot(rep.L, sigma_recursive(rep, None, K + 1, w))
    if is_zero_insensitive(rep):
        return S
    Q = q_matrix(rep)
    acc = list(rep.C)
    v = list(rep.C)
    for _ in range(K):
        v = ex.mat_vec(Q, v)
        acc = ex.vec_add(acc, v)
    left = ex.vec_sub(rep.L, ex.vec_mat(rep.L, rep.A[0]))
    return ex.dot(left, acc) + S


# -- derived representations ------------------------------------------------

def radix_power(rep, k=2):
    """Same sequence in radix ``B^k`` (requires a zero-insensitive representation).

    The digit ``d = (b_1 ... b_k)_B`` gets ``A'_d = A_{b_1} ... A_{b_k}``.
    """
    if not is_zero_insensitive(rep):
        raise InputError("radix conversion needs a zero-insensitive representation")
    B = rep.radix
    mats = []
    for d in range(B ** k):
        ds = list(digits(d, B))
        mats.append(rep.word_matrix([0] * (k - len(ds)) + ds))
    return LinearRepresentation(rep.L, mats, rep.C, radix=B ** k,
                                name=f"{rep.name}-radix{B ** k}" if rep.name else "")


def transposed(rep):
    """Mirror representation reading digits least significant first."""
    return LinearRepresentation(rep.C, [ex.transpose(M) for M in rep.A], rep.L,
                                radix=rep.radix, name=rep.name, meta=rep.meta)


def check_against_oracle(rep, oracle, n_max):
    """First ``n <= n_max`` with ``u_n != oracle(n)``, or ``None``."""
    for n, u in enumerate(eval_range(rep, n_max)):
        if u != oracle(n):
            return n
    return None


# -- reverse direction: building a representation from a sequence ----------

def close_under_multisection(oracle, B, window, dim_cap, verify_factor=4):
    """Representation of a ``B``-rational sequence given by ``oracle``.

    The basis sequences are ``s`` and its multisections
    ``n -> s(B^k n + r)`` met breadth-first; a candidate joins the basis when
    its first ``window`` terms are independent of the current basis (exact
    elimination).  The result is re-checked on ``verify_factor * window``
    terms and is zero-insensitive by construction.
    """
    if window < dim_cap:
        raise InputError("window must be at least dim_cap")
    cache = {}

    def value(n):
        v = cache.get(n)
        if v is None:
            v = cache[n] = ex.to_rational(oracle(n))
        return v

    def samples(seq, length):
        a, r = seq
        return [value(a * n + r) for n in range(length)]

    long_window = verify_factor * window
    if not any(samples((1, 0), window)):
        bad = next((n for n, v in enumerate(samples((1, 0), long_window)) if v), None)
        if bad is not None:
            raise VerificationError(f"sequence vanishes on the window but s({bad}) != 0", index=bad)
        return LinearRepresentation([], [[] for _ in range(B)], [], radix=B, name="zero")

    basis = [(1, 0)]
    echelon = ex.EchelonBasis(window)
    echelon.add(samples((1, 0), window))
    columns = {}  # (b, j) -> coordinates over the basis at the time
    queue = deque([0])
    while queue:
        j = queue.popleft()
        a, r = basis[j]
        for b in range(B):
            child = (a * B, a * b + r)
            vec = samples(child, window)
            coords = echelon.coordinates(vec)
            if coords is None:
                if len(basis) >= dim_cap:
                    raise DimensionCapError(
                        f"more than {dim_cap} independent multisections "
                        f"(sequence not {B}-rational at this cap, or window too small)")
                echelon.add(vec)
                basis.append(child)
                queue.append(len(basis) - 1)
                coords = echelon.coordinates(vec)
            columns[b, j] = coords
    d = len(basis)
    A = [ex.zeros(d, d) for _ in range(B)]
    for (b, j), coords in columns.items():
        for i, c in enumerate(coords):
            A[b][i][j] = c
    L = [value(r) for (a, r) in basis]
    C = [ex.ONE] + [ex.ZERO] * (d - 1)
    rep = LinearRepresentation(L, A, C, radix=B)

    long_samples = [samples(seq, long_window) for seq in basis]
    for j, (a, r) in enumerate(basis):
        for b in range(B):
            child = (a * B, a * b + r)
            got = samples(child, long_window)
            want = [sum((A[b][i][j] * long_samples[i][n] for i in range(d)), ex.ZERO)
                    for n in range(long_window)]
            if got != want:
                n = next(n for n in range(long_window) if got[n] != want[n])
                raise VerificationError(
                    f"dependence found on the window fails at s({child[0] * n + child[1]})",
                    index=child[0] * n + child[1])
    bad = check_against_oracle(rep, value, long_window)
    if bad is not None:
        raise VerificationError(f"representation disagrees with the oracle at n = {bad}", index=bad)
    return rep


# -- file format ------------------------------------------------------------

def _dump_entry(x):
    return ex.format_rational(x) if ex.is_exact(x) else float(x)


def _load_entry(x):
    if isinstance(x, bool):
        raise InputError(f"invalid entry {x!r}")
    if isinstance(x, (Integral, float)):
        return x
    if isinstance(x, str):
        return ex.to_rational(x)
    raise InputError(f"invalid entry {x!r}")


def to_dict(rep):
    out = {
        "radix": rep.radix,
        "dim": rep.dim,
        "L": [_dump_entry(x) for x in rep.L],
        "A": [[[_dump_entry(x) for x in row] for row in M] for M in rep.A],
        "C": [_dump_entry(x) for x in rep.C],
    }
    if rep.name:
        out["name"] = rep.name
    out.update(rep.meta)
    return out


_CORE_KEYS = {"radix", "dim", "L", "A", "C", "name"}


def from_dict(data, transpose=False):
    """Build a representation from the JSON object layout.

    ``transpose=True`` imports a file written in the mirrored convention
    ``u_n = L' A'_{n_0} ... A'_{n_{l-1}} C'`` (least significant digit first).
    """
    try:
        radix = int(data["radix"])
        dim = int(data["dim"])
        L = [_load_entry(x) for x in data["L"]]
        A = [[[_load_entry(x) for x in row] for row in M] for M in data["A"]]
        C = [_load_entry(x) for x in data["C"]]
    except KeyError as exc:
        raise InputError(f"missing key {exc.args[0]!r}") from exc
    except (TypeError, ValueError) as exc:
        raise InputError(f"malformed representation: {exc}") from exc
    if len(L) != dim:
        raise InputError(f"dim = {dim} but L has {len(L)} entries")
    meta = {k: v for k, v in data.items() if k not in _CORE_KEYS}
    rep = LinearRepresentation(L, A, C, radix=radix, name=data.get("name", ""), meta=meta)
    return transposed(rep) if transpose else rep


def dumps(rep, **kw):
    return json.dumps(to_dict(rep), **kw)


def loads(text, transpose=False):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return from_dict(data, transpose=transpose)


def load(path, transpose=False):
    with open(path) as fh:
        return loads(fh.read(), transpose=transpose)


def save(rep, path):
    with open(path, "w") as fh:
        fh.write(dumps(rep, indent=1))
        fh.write("\n")
