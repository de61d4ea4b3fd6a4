"""Exact dense matrix arithmetic over the integers and rationals.

Everything here works on Python ints and :class:`fractions.Fraction`; no
floating point value is ever produced.  Matrices are immutable.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence


class DimensionError(ValueError):
    pass


def _as_exact(v):
    if isinstance(v, (int, Fraction)):
        return v
    if isinstance(v, bool):
        return int(v)
    # numpy integer scalars and mpq end up here
    if hasattr(v, "numerator") and hasattr(v, "denominator"):
        f = Fraction(int(v.numerator), int(v.denominator))
        return f.numerator if f.denominator == 1 else f
    raise TypeError(f"non-exact entry {v!r}")


class Matrix:
    """Immutable row-major matrix with int or Fraction entries.

    Zero-row matrices are allowed (the empty ``R`` block when m == n) as long
    as ``ncols`` is given explicitly.
    """

    __slots__ = ("_rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        data = tuple(tuple(_as_exact(v) for v in r) for r in rows)
        if data:
            width = len(data[0])
            for i, r in enumerate(data):
                if len(r) != width:
                    raise DimensionError(f"row {i} has length {len(r)}, expected {width}")
            if ncols is not None and ncols != width:
                raise DimensionError("ncols disagrees with row length")
            ncols = width
        elif ncols is None:
            raise DimensionError("empty matrix needs an explicit column count")
        self._rows = data
        self.nrows = len(data)
        self.ncols = ncols

    # construction helpers -------------------------------------------------
    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, m: int, n: int) -> "Matrix":
        return cls([[0] * n for _ in range(m)], n)

    @classmethod
    def diag(cls, entries: Sequence) -> "Matrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)], n)

    # basic protocol -------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def rows(self) -> tuple[tuple, ...]:
        return self._rows

    def __getitem__(self, idx):
        i, j = idx
        return self._rows[i][j]

    def row(self, i: int) -> tuple:
        return self._rows[i]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self._rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self.shape, self._rows))

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(v) for v in r) + "]" for r in self._rows)
        return f"Matrix([{body}], ncols={self.ncols})"

    def tolist(self) -> list[list]:
        return [list(r) for r in self._rows]

    # algebra ----------------------------------------------------------------
    @property
    def T(self) -> "Matrix":
        return Matrix([[r[j] for r in self._rows] for j in range(self.ncols)], self.nrows)

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
            cols = other.T.rows
            return Matrix(
                [[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self._rows],
                other.ncols,
            )
        v = tuple(other)
        if len(v) != self.ncols:
            raise DimensionError(f"cannot multiply {self.shape} by vector of length {len(v)}")
        return tuple(_norm(sum(a * b for a, b in zip(r, v))) for r in self._rows)

    def __neg__(self) -> "Matrix":
        return Matrix([[-v for v in r] for r in self._rows], self.ncols)

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise DimensionError("shape mismatch")
        return Matrix([[a + b for a, b in zip(r, s)] for r, s in zip(self._rows, other._rows)], self.ncols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def scale(self, c) -> "Matrix":
        return Matrix([[_norm(c * v) for v in r] for r in self._rows], self.ncols)

    def select_rows(self, idx: Sequence[int]) -> "Matrix":
        return Matrix([self._rows[i] for i in idx], self.ncols)

    def select_cols(self, idx: Sequence[int]) -> "Matrix":
        return Matrix([[r[j] for j in idx] for r in self._rows], len(idx))

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.nrows != other.nrows:
            raise DimensionError("row count mismatch")
        return Matrix([a + b for a, b in zip(self._rows, other._rows)], self.ncols + other.ncols)

    def vstack(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.ncols:
            raise DimensionError("column count mismatch")
        return Matrix(self._rows + other._rows, self.ncols)

    def is_integral(self) -> bool:
        return all(_is_int(v) for r in self._rows for v in r)

    def to_int(self) -> "Matrix":
        if not self.is_integral():
            raise ValueError("matrix has fractional entries")
        return Matrix([[int(v) for v in r] for r in self._rows], self.ncols)

    def support(self) -> "Matrix":
        """0/1 pattern of nonzero entries."""
        return Matrix([[1 if v else 0 for v in r] for r in self._rows], self.ncols)


def _is_int(v) -> bool:
    return isinstance(v, int) or v.denominator == 1


def _norm(v):
    if isinstance(v, Fraction) and v.denominator == 1:
        return v.numerator
    return v


def as_matrix(M) -> Matrix:
    return M if isinstance(M, Matrix) else Matrix(M)


# --------------------------------------------------------------------------
# fraction-free kernels

def _integer_rows(M: Matrix) -> list[list[int]]:
    """Scale each row by the lcm of its denominators; preserves rank."""
    out = []
    for r in M.rows:
        den = 1
        for v in r:
            if isinstance(v, Fraction):
                den = den * v.denominator // gcd(den, v.denominator)
        out.append([int(v * den) for v in r])
    return out


def bareiss_det(rows: list[list[int]]) -> int:
    """Determinant of a square integer matrix by Bareiss elimination."""
    n = len(rows)
    if n == 0:
        return 1
    a = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        rk = a[k]
        for i in range(k + 1, n):
            ri = a[i]
            aik = ri[k]
            for j in range(k + 1, n):
                ri[j] = (akk * ri[j] - aik * rk[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def det_exact(M) -> int | Fraction:
    M = as_matrix(M)
    if M.nrows != M.ncols:
        raise DimensionError(f"determinant of non-square {M.shape} matrix")
    if M.is_integral():
        return bareiss_det([[int(v) for v in r] for r in M.rows])
    scale = 1
    rows = []
    for r in M.rows:
        den = 1
        for v in r:
            if isinstance(v, Fraction):
                den = den * v.denominator // gcd(den, v.denominator)
        scale *= den
        rows.append([int(v * den) for v in r])
    return _norm(Fraction(bareiss_det(rows), scale))


def rank(M) -> int:
    M = as_matrix(M)
    a = _integer_rows(M)
    m, n = M.nrows, M.ncols
    r = 0
    prev = 1
    for c in range(n):
        if r == m:
            break
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        for i in range(r + 1, m):
            aic = a[i][c]
            a[i] = [(p * x - aic * y) // prev for x, y in zip(a[i], a[r])]
        prev = p
        r += 1
    return r


def rref(M) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q and the pivot columns."""
    M = as_matrix(M)
    a = [[Fraction(v) for v in r] for r in M.rows]
    m, n = M.nrows, M.ncols
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        if p != 1:
            a[r] = [x / p for x in a[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def solve_exact(M, v: Sequence) -> tuple | None:
    """Some exact solution x of ``M x = v``, or None when inconsistent.

    If M has full column rank the solution is unique.  Free variables of an
    underdetermined system are set to zero.
    """
    M = as_matrix(M)
    v = tuple(_as_exact(x) for x in v)
    if len(v) != M.nrows:
        raise DimensionError(f"rhs has length {len(v)}, matrix has {M.nrows} rows")
    aug = Matrix([r + (b,) for r, b in zip(M.rows, v)], M.ncols + 1)
    a, pivots = rref(aug)
    if M.ncols in pivots:
        return None
    x = [0] * M.ncols
    for row, c in zip(a, pivots):
        x[c] = _norm(row[-1])
    return tuple(x)


def nullspace(M) -> list[tuple]:
    """Basis of the right kernel, one vector per free column."""
    M = as_matrix(M)
    a, pivots = rref(M)
    free = [c for c in range(M.ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * M.ncols
        x[f] = Fraction(1)
        for row, c in zip(a, pivots):
            x[c] = -row[f]
        basis.append(tuple(_norm(t) for t in x))
    return basis


def inverse(M) -> Matrix:
    M = as_matrix(M)
    n = M.nrows
    if n != M.ncols:
        raise DimensionError("inverse of non-square matrix")
    aug = M.hstack(Matrix.identity(n))
    a, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return Matrix([[_norm(x) for x in r[n:]] for r in a], n)


def is_unimodular(M) -> bool:
    M = as_matrix(M)
    if M.nrows != M.ncols:
        raise DimensionError("unimodularity needs a square matrix")
    if not M.is_integral():
        return False
    return abs(det_exact(M)) == 1


def primitive(v: Sequence) -> tuple[int, ...]:
    """Scale a rational vector to the primitive integer vector on its ray."""
    fr = [Fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


def is_integral_vector(v: Sequence) -> bool:
    return all(_is_int(_as_exact(x)) for x in v)
