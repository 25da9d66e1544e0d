"""Exact rational arithmetic with a p-adic lens.

Scalars are gmpy2.mpq; the prime is always an explicit argument, never
ambient state.  Matrices are immutable, dense, row-major; vectors are
rows, so a matrix acts on the right (x |-> x*A) unless a function says
otherwise.

Two layers of row reduction live here:

* rref / kernel / solve_linear / invert -- ordinary linear algebra over Q;
* dvr_echelon / dvr_kernel -- canonical echelon form of the span of the
  rows over the local ring Z_(p) = {a/b : p does not divide b}.  Pivot
  entries are exact powers of p, entries above a pivot are canonical
  residues modulo that power, so two generating sets have the same
  Z_(p)-span iff their echelons are identical.

Everything downstream (lattice calculus, relations, star products)
reduces to these two layers.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from gmpy2 import invert as _mod_invert
from gmpy2 import mpq, mpz, remove as _remove

INF = math.inf

__all__ = [
    "INF", "NotPrime", "Singular", "check_prime", "rat", "p_pow",
    "valuation", "frac_part", "char_value", "reduce_mod_power",
    "Mat", "hstack", "vstack", "block_diag", "kron", "dot",
    "rref", "kernel", "solve_linear", "invert", "det",
    "DvrEchelon", "dvr_echelon", "dvr_kernel", "min_valuation",
]


class NotPrime(ValueError):
    pass


class Singular(ValueError):
    pass


_PRIMES: set[int] = set()


def check_prime(p) -> int:
    """Validate p as a prime integer (trial division, adequate for p <= 10**12)."""
    p = int(p)
    if p in _PRIMES:
        return p
    if p < 2:
        raise NotPrime(f"not a prime: {p}")
    d = 2
    while d * d <= p:
        if p % d == 0:
            raise NotPrime(f"not a prime: {p} = {d} * {p // d}")
        d += 1 if d == 2 else 2
    _PRIMES.add(p)
    return p


def rat(x) -> mpq:
    """Coerce to an exact rational.  Floats are rejected on purpose."""
    if type(x) is mpq:
        return x
    if isinstance(x, float):
        raise TypeError(f"refusing inexact float {x!r}; pass an int, string or Fraction")
    return mpq(x)


def p_pow(p, a) -> mpq:
    """p**a as an exact rational, a any integer."""
    if a >= 0:
        return mpq(mpz(p) ** a)
    return mpq(1, mpz(p) ** (-a))


def valuation(x, p):
    """p-adic valuation of a rational; valuation(0, p) is +infinity (math.inf)."""
    p = check_prime(p)
    x = rat(x)
    if x == 0:
        return INF
    num, den = x.numerator, x.denominator
    if num % p == 0:
        _, v = _remove(num, p)
        return int(v)
    if den % p == 0:
        _, v = _remove(den, p)
        return -int(v)
    return 0


def frac_part(x, p) -> mpq:
    """The unique m/p**r in [0, 1) with x - frac_part(x, p) in Z_(p)."""
    p = check_prime(p)
    x = rat(x)
    v = valuation(x, p)
    if v >= 0:  # covers x == 0 (v = inf)
        return mpq(0)
    r = -v
    q = mpz(p) ** r
    b = x.denominator // q          # prime to p
    m = (x.numerator * _mod_invert(b, q)) % q
    return mpq(m, q)


def char_value(x, p) -> complex:
    """exp(2*pi*i*frac_part(x, p)): the standard additive character, trivial on Z_(p)."""
    f = frac_part(x, p)
    return cmath.exp(2j * cmath.pi * (int(f.numerator) / int(f.denominator)))


def reduce_mod_power(x, a, p) -> mpq:
    """Canonical residue of x modulo p**a * Z_(p).

    Returns the unique r = m * p**v (v = valuation(x, p), 0 <= m < p**(a-v))
    with x - r in p**a * Z_(p); zero when valuation(x, p) >= a.
    """
    p = check_prime(p)
    x = rat(x)
    v = valuation(x, p)
    if v >= a:
        return mpq(0)
    k = a - v
    q = mpz(p) ** k
    u = x / p_pow(p, v)             # a p-adic unit
    m = (u.numerator * _mod_invert(u.denominator, q)) % q
    return m * p_pow(p, v)


# ---------------------------------------------------------------------------
# matrices


class Mat:
    """Immutable dense matrix of exact rationals."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows, ncols=None):
        data = tuple(tuple(rat(e) for e in row) for row in rows)
        if data:
            n = len(data[0])
            if any(len(r) != n for r in data):
                raise ValueError("ragged rows")
            if ncols is not None and ncols != n:
                raise ValueError(f"ncols={ncols} but rows have length {n}")
            ncols = n
        elif ncols is None:
            raise ValueError("a matrix with no rows needs an explicit ncols")
        object.__setattr__(self, "rows", data)
        object.__setattr__(self, "nrows", len(data))
        object.__setattr__(self, "ncols", ncols)

    def __setattr__(self, name, value):
        raise AttributeError("Mat is immutable")

    # -- construction helpers

    @classmethod
    def identity(cls, n):
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], ncols=n)

    @classmethod
    def zeros(cls, m, n):
        return cls([[0] * n for _ in range(m)], ncols=n)

    @classmethod
    def diagonal(cls, entries):
        entries = [rat(e) for e in entries]
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)], ncols=n)

    @classmethod
    def row(cls, entries):
        return cls([list(entries)])

    @classmethod
    def block(cls, grid):
        """Assemble from a grid of Mat / 0 entries; 0 means a zero block
        whose size is inferred from its row and column neighbours."""
        heights = [None] * len(grid)
        widths = [None] * (len(grid[0]) if grid else 0)
        for i, grow in enumerate(grid):
            if len(grow) != len(widths):
                raise ValueError("ragged block grid")
            for j, cell in enumerate(grow):
                if isinstance(cell, Mat):
                    if heights[i] is not None and heights[i] != cell.nrows:
                        raise ValueError("inconsistent block heights")
                    if widths[j] is not None and widths[j] != cell.ncols:
                        raise ValueError("inconsistent block widths")
                    heights[i] = cell.nrows
                    widths[j] = cell.ncols
        if any(h is None for h in heights) or any(w is None for w in widths):
            raise ValueError("cannot infer the size of an all-zero block row/column")
        out = []
        for i, grow in enumerate(grid):
            cells = [cell if isinstance(cell, Mat) else Mat.zeros(heights[i], widths[j])
                     for j, cell in enumerate(grow)]
            for k in range(heights[i]):
                out.append([e for cell in cells for e in cell.rows[k]])
        return cls(out, ncols=sum(widths))

    # -- basics

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, Mat) and self.ncols == other.ncols and self.rows == other.rows

    def __hash__(self):
        return hash((self.ncols, self.rows))

    def __repr__(self):
        if self.nrows * self.ncols <= 40:
            body = "; ".join(" ".join(str(e) for e in row) for row in self.rows)
            return f"Mat({self.nrows}x{self.ncols}: {body})"
        return f"Mat({self.nrows}x{self.ncols})"

    def is_zero(self):
        return all(e == 0 for row in self.rows for e in row)

    # -- arithmetic

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return Mat([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)],
                   ncols=self.ncols)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Mat([[-e for e in row] for row in self.rows], ncols=self.ncols)

    def __mul__(self, other):
        if isinstance(other, Mat):
            if self.ncols != other.nrows:
                raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
            bt = other.transpose().rows
            return Mat([[_dot(r, c) for c in bt] for r in self.rows], ncols=other.ncols)
        q = rat(other)
        return Mat([[q * e for e in row] for row in self.rows], ncols=self.ncols)

    def __rmul__(self, other):
        q = rat(other)
        return Mat([[q * e for e in row] for row in self.rows], ncols=self.ncols)

    def __truediv__(self, other):
        q = rat(other)
        return self * (1 / q)

    def transpose(self):
        return Mat([[self.rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)],
                   ncols=self.nrows)

    T = property(transpose)

    def submatrix(self, row_ids, col_ids):
        col_ids = list(col_ids)
        return Mat([[self.rows[i][j] for j in col_ids] for i in row_ids], ncols=len(col_ids))

    def take_cols(self, col_ids):
        return self.submatrix(range(self.nrows), col_ids)

    def take_rows(self, row_ids):
        return self.submatrix(row_ids, range(self.ncols))


def _dot(u, v):
    s = mpq(0)
    for a, b in zip(u, v):
        if a and b:
            s += a * b
    return s


def dot(u, v):
    """Exact dot product of two same-length vectors (any rational entries)."""
    u = [rat(e) for e in u]
    v = [rat(e) for e in v]
    if len(u) != len(v):
        raise ValueError("length mismatch")
    return _dot(u, v)


def hstack(*mats) -> Mat:
    mats = [m for m in mats]
    if not mats:
        raise ValueError("nothing to stack")
    m = mats[0].nrows
    if any(a.nrows != m for a in mats):
        raise ValueError("row count mismatch")
    return Mat([[e for a in mats for e in a.rows[i]] for i in range(m)],
               ncols=sum(a.ncols for a in mats))


def vstack(*mats) -> Mat:
    if not mats:
        raise ValueError("nothing to stack")
    n = mats[0].ncols
    if any(a.ncols != n for a in mats):
        raise ValueError("column count mismatch")
    return Mat([row for a in mats for row in a.rows], ncols=n)


def block_diag(*mats) -> Mat:
    n = sum(a.ncols for a in mats)
    out, off = [], 0
    for a in mats:
        for row in a.rows:
            out.append([mpq(0)] * off + list(row) + [mpq(0)] * (n - off - a.ncols))
        off += a.ncols
    return Mat(out, ncols=n)


def kron(a: Mat, b: Mat) -> Mat:
    """Kronecker product; index (i, s) of a (x) b is i*b.ncols + s column-wise."""
    out = []
    for arow in a.rows:
        for brow in b.rows:
            out.append([x * y for x in arow for y in brow])
    return Mat(out, ncols=a.ncols * b.ncols)


# ---------------------------------------------------------------------------
# linear algebra over Q


def rref(M: Mat):
    """Reduced row echelon form over Q.  Returns (R, pivot_columns); zero
    rows are kept at the bottom so R has the same shape as M."""
    m, n = M.shape
    rows = [list(r) for r in M.rows]
    piv = []
    r = 0
    for c in range(n):
        if r == m:
            break
        k = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if k is None:
            continue
        rows[r], rows[k] = rows[k], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [inv * e for e in rows[r]]
        for i in range(m):
            f = rows[i][c]
            if i != r and f != 0:
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        piv.append(c)
        r += 1
    return Mat(rows, ncols=n), tuple(piv)


def kernel(M: Mat) -> Mat:
    """Rows form a basis of the left kernel {x in Q**m : x*M == 0}."""
    m, n = M.shape
    R, _ = rref(hstack(M, Mat.identity(m)))
    out = [row[n:] for row in R.rows if all(e == 0 for e in row[:n])]
    return Mat(out, ncols=m)


def solve_linear(A: Mat, b) -> tuple:
    """One solution x of A*x == b (b and x column vectors given as sequences).

    Raises Singular when the system is inconsistent.  Free coordinates are
    set to zero, so the answer is deterministic.
    """
    bb = [rat(e) for e in b]
    if len(bb) != A.nrows:
        raise ValueError("right-hand side has wrong length")
    aug = hstack(A, Mat([[e] for e in bb], ncols=1))
    R, piv = rref(aug)
    if A.ncols in piv:
        raise Singular("inconsistent linear system")
    x = [mpq(0)] * A.ncols
    for i, c in enumerate(piv):
        x[c] = R.rows[i][A.ncols]
    return tuple(x)


def invert(A: Mat) -> Mat:
    if A.nrows != A.ncols:
        raise Singular(f"not square: {A.shape}")
    n = A.nrows
    R, piv = rref(hstack(A, Mat.identity(n)))
    if piv != tuple(range(n)):
        raise Singular("matrix is singular")
    return R.take_cols(range(n, 2 * n))


def det(A: Mat) -> mpq:
    if A.nrows != A.ncols:
        raise ValueError(f"not square: {A.shape}")
    n = A.nrows
    rows = [list(r) for r in A.rows]
    d = mpq(1)
    for c in range(n):
        k = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if k is None:
            return mpq(0)
        if k != c:
            rows[c], rows[k] = rows[k], rows[c]
            d = -d
        d *= rows[c][c]
        inv = 1 / rows[c][c]
        for i in range(c + 1, n):
            f = rows[i][c] * inv
            if f != 0:
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[c])]
    return d


# ---------------------------------------------------------------------------
# echelon form over Z_(p)


@dataclass(frozen=True)
class DvrEchelon:
    """Canonical echelon form of the Z_(p)-span of the rows of a matrix.

    mat    -- the nonzero canonical rows (pivot entries exact powers of p)
    pivots -- one (column, exponent) pair per row, columns strictly increasing
    p      -- the prime

    Canonical means: equal Z_(p)-spans give bit-identical DvrEchelon values.
    """
    mat: Mat
    pivots: tuple
    p: int

    @property
    def rank(self):
        return len(self.pivots)


def dvr_echelon(M: Mat, p) -> DvrEchelon:
    """Canonical echelon basis of the Z_(p)-module spanned by the rows of M.

    Forward pass: in each column, among the rows not yet used as pivots,
    take one of minimal valuation v, scale it by a unit so the pivot entry
    is exactly p**v, and clear the column from every other remaining row
    (legal over Z_(p) since their valuations there are >= v).  Back pass,
    in increasing pivot order: reduce each entry above a pivot p**a to its
    canonical residue modulo p**a * Z_(p).
    """
    p = check_prime(p)
    m, n = M.shape
    rows = [list(r) for r in M.rows]
    piv = []
    r = 0
    for c in range(n):
        if r == m:
            break
        cand = [(valuation(rows[i][c], p), i) for i in range(r, m) if rows[i][c] != 0]
        if not cand:
            continue
        v, k = min(cand)
        rows[r], rows[k] = rows[k], rows[r]
        pivot_value = p_pow(p, v)
        u = rows[r][c] / pivot_value        # unit of Z_(p)
        uinv = 1 / u
        rows[r] = [uinv * e for e in rows[r]]
        for i in range(r + 1, m):
            e = rows[i][c]
            if e != 0:
                f = e / pivot_value          # in Z_(p) by minimality of v
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        piv.append((c, v))
        r += 1
    for i, (c, a) in enumerate(piv):
        pa = p_pow(p, a)
        for j in range(i):
            e = rows[j][c]
            if e != 0:
                f = (e - reduce_mod_power(e, a, p)) / pa    # in Z_(p)
                if f != 0:
                    rows[j] = [x - f * y for x, y in zip(rows[j], rows[i])]
    return DvrEchelon(Mat(rows[:len(piv)], ncols=n), tuple(piv), p)


def dvr_kernel(M: Mat, p) -> Mat:
    """Rows form a Z_(p)-basis of {x in Z_(p)**m : x*M == 0}, m = M.nrows.

    Row-reduces [M | I] over Z_(p); the rows whose M-part died carry, in
    their I-part, integral coefficient vectors of the relations, and the
    echelon shape makes them a basis.
    """
    m, n = M.shape
    ech = dvr_echelon(hstack(M, Mat.identity(m)), p)
    out = [row[n:] for row, (c, _) in zip(ech.mat.rows, ech.pivots) if c >= n]
    return Mat(out, ncols=m)


def min_valuation(M: Mat, p):
    """Smallest p-adic valuation over all entries (inf for a zero matrix)."""
    return min((valuation(e, p) for row in M.rows for e in row), default=INF)
