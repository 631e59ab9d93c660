"""Small dense linear algebra over exact rationals.

Matrices are lists of rows, vectors are plain lists.  Entries are
:class:`gmpy2.mpq` in exact mode and ``float`` (or ``complex``) in float
mode; the arithmetic helpers are agnostic and simply use ``+`` and ``*``.
The elimination routines (rank, kernel, solve) are exact-only.
"""

from fractions import Fraction
from numbers import Integral

from gmpy2 import mpq

from .errors import InputError

Rational = type(mpq())

ZERO = mpq(0)
ONE = mpq(1)


def is_exact(x):
    return isinstance(x, (Rational, Integral, Fraction))


def to_rational(x):
    """Coerce ``x`` to an exact rational.

    Accepts integers, :class:`fractions.Fraction`, ``mpq`` and strings such
    as ``"3/4"``, ``"-2"`` or ``"0.125"``.  Floats are refused: exactness
    must never depend on a binary rounding that already happened.
    """
    if isinstance(x, Rational):
        return x
    if isinstance(x, bool):
        raise InputError(f"not a rational: {x!r}")
    if isinstance(x, Integral):
        return mpq(int(x))
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        s = x.strip().replace("−", "-")
        try:
            return mpq(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"cannot parse rational {x!r}") from exc
    raise InputError(f"not an exact rational: {x!r}")


def format_rational(x):
    """``"p/q"`` or ``"p"``; floats fall back to ``repr``."""
    if isinstance(x, Rational):
        return str(x)
    if isinstance(x, Integral):
        return str(int(x))
    if isinstance(x, Fraction):
        return str(x)
    return repr(float(x))


def to_fraction(x):
    x = to_rational(x)
    return Fraction(int(x.numerator), int(x.denominator))


# -- construction -----------------------------------------------------------

def zeros(n, m=None, zero=ZERO):
    if m is None:
        return [zero] * n
    return [[zero] * m for _ in range(n)]


def identity(n, one=ONE, zero=ZERO):
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def transpose(A):
    return [list(col) for col in zip(*A)] if A else []


def column(A, j):
    return [row[j] for row in A]


def from_columns(cols, nrows):
    if not cols:
        return [[] for _ in range(nrows)]
    return [[c[i] for c in cols] for i in range(nrows)]


# -- arithmetic -------------------------------------------------------------

def zero_like(x):
    """A zero of the same numeric type as ``x`` (mpq, float or complex)."""
    return x * 0


def dot(u, v):
    s = None
    for a, b in zip(u, v):
        if a and b:
            s = a * b if s is None else s + a * b
    if s is None:
        return zero_like(u[0]) if u else ZERO
    return s


def mat_vec(A, v):
    return [dot(row, v) for row in A]


def vec_mat(v, A):
    if not A:
        return []
    m = len(A[0])
    out = [zero_like(A[0][0]) if m else ZERO] * m
    for a, row in zip(v, A):
        if a:
            for j, b in enumerate(row):
                if b:
                    out[j] = out[j] + a * b
    return out


def mat_mul(A, B):
    if not A:
        return []
    if not B:
        return [[] for _ in A]
    return [vec_mat(row, B) for row in A]


def mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scale(c, A):
    return [[c * a for a in row] for row in A]


def vec_add(u, v):
    return [a + b for a, b in zip(u, v)]


def vec_sub(u, v):
    return [a - b for a, b in zip(u, v)]


def vec_scale(c, v):
    return [c * a for a in v]


def mat_pow(A, k):
    n = len(A)
    if n and not is_exact(A[0][0]):
        R = identity(n, one=1.0, zero=0.0)
    else:
        R = identity(n)
    P = A
    while k:
        if k & 1:
            R = mat_mul(R, P)
        k >>= 1
        if k:
            P = mat_mul(P, P)
    return R


def is_zero_matrix(A):
    return all(not a for row in A for a in row)


def sparse_rows(A):
    """Nonzero pattern of ``A`` as ``[[(j, a_ij), ...], ...]``."""
    return [[(j, a) for j, a in enumerate(row) if a] for row in A]


def sparse_mat_vec(S, v):
    zero = zero_like(v[0]) if v else ZERO
    out = []
    for row in S:
        s = zero
        for j, a in row:
            x = v[j]
            if x:
                s = s + a * x
        out.append(s)
    return out


def norm1(A):
    """Maximum absolute column sum."""
    if not A:
        return ZERO
    z = abs(zero_like(A[0][0]))
    return max(sum((abs(A[i][j]) for i in range(len(A))), z) for j in range(len(A[0])))


def norm_inf(A):
    """Maximum absolute row sum."""
    if not A:
        return ZERO
    z = abs(zero_like(A[0][0]))
    return max(sum((abs(a) for a in row), z) for row in A)


# -- exact elimination ------------------------------------------------------

def rref(M):
    """Reduced row echelon form; returns ``(R, pivot_columns)``."""
    R = [list(row) for row in M]
    nrows = len(R)
    ncols = len(R[0]) if R else 0
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, nrows) if R[i][c]), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        inv = 1 / R[r][c]
        R[r] = [x * inv for x in R[r]]
        for i in range(nrows):
            if i != r and R[i][c]:
                f = R[i][c]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return R, pivots


def rank(M):
    return len(rref(M)[1]) if M and M[0] else 0


def nullspace(M, ncols=None):
    """Kernel basis, one vector per free column in increasing column order.

    Each basis vector has a 1 in its free column and zeros in the other free
    columns, which makes the result canonical for a given matrix.
    """
    if ncols is None:
        ncols = len(M[0]) if M else 0
    if not M:
        return [[ONE if i == j else ZERO for i in range(ncols)] for j in range(ncols)]
    R, pivots = rref(M)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * ncols
        v[f] = ONE
        for row, pc in zip(R, pivots):
            if row[f]:
                v[pc] = -row[f]
        basis.append(v)
    return basis


def solve(A, b):
    """Solve ``A x = b`` for square nonsingular ``A``; raises ``ZeroDivisionError`` otherwise."""
    n = len(A)
    aug = [list(A[i]) + [b[i]] for i in range(n)]
    for c in range(n):
        p = next((i for i in range(c, n) if aug[i][c]), None)
        if p is None:
            raise ZeroDivisionError("singular matrix")
        aug[c], aug[p] = aug[p], aug[c]
        inv = 1 / aug[c][c]
        pivot_row = [x * inv for x in aug[c]]
        aug[c] = pivot_row
        for i in range(n):
            if i != c and aug[i][c]:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], pivot_row)]
    return [aug[i][n] for i in range(n)]


def inverse(A):
    n = len(A)
    aug = [list(A[i]) + [ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in R]


def det(A):
    n = len(A)
    M = [list(row) for row in A]
    d = ONE
    for c in range(n):
        p = next((i for i in range(c, n) if M[i][c]), None)
        if p is None:
            return ZERO
        if p != c:
            M[c], M[p] = M[p], M[c]
            d = -d
        d = d * M[c][c]
        inv = 1 / M[c][c]
        for i in range(c + 1, n):
            if M[i][c]:
                f = M[i][c] * inv
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return d


class EchelonBasis:
    """Incrementally grown basis of a subspace, kept in echelon form.

    ``coordinates(v)`` expresses ``v`` over the vectors inserted so far (in
    insertion order) or returns ``None`` when ``v`` is independent of them.
    """

    def __init__(self, dim):
        self.dim = dim
        self.vectors = []
        # each row: (pivot, reduced vector, combination over inserted vectors)
        self._rows = []

    def __len__(self):
        return len(self.vectors)

    def _reduce(self, v):
        v = list(v)
        combo = [ZERO] * len(self.vectors)
        for pivot, row, rc in self._rows:
            c = v[pivot]
            if c:
                v = [a - c * b for a, b in zip(v, row)]
                combo = [a + c * b for a, b in zip(combo, rc)]
        return v, combo

    def coordinates(self, v):
        rest, combo = self._reduce(v)
        if any(rest):
            return None
        return combo

    def add(self, v):
        """Insert ``v``; returns ``True`` if it enlarged the span."""
        rest, combo = self._reduce(v)
        pivot = next((i for i, a in enumerate(rest) if a), None)
        if pivot is None:
            return False
        self.vectors.append(list(v))
        # rest = v - sum combo_i * vec_i ; normalise at the pivot
        inv = 1 / rest[pivot]
        row = [a * inv for a in rest]
        rc = [-c * inv for c in combo] + [inv]
        # eliminate the new pivot from existing rows to keep reduced form
        new_rows = []
        for p, r, c in self._rows:
            f = r[pivot]
            if f:
                r = [a - f * b for a, b in zip(r, row)]
                c = [a - f * b for a, b in zip(c + [ZERO], rc)]
            else:
                c = c + [ZERO]
            new_rows.append((p, r, c))
        new_rows.append((pivot, row, rc))
        self._rows = new_rows
        return True
