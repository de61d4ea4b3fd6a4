"""Unimodular triples (U, R, H) and the slack-space congruence reformulation.

For A with full column rank, a triple satisfies

    [U; R] unimodular,  [U; R] A = [H; 0],  |det H| = gcd(A).

Then integer points x of {Ax <= b} correspond one-to-one to integer slacks
y = b - Ax >= 0 with R(y - b) = 0 and U(y - b) in H Z^n.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .linalg import Matrix, as_matrix, det_exact, inverse, is_unimodular, rank, solve_exact
from .modularity import BasisSplit, is_totally_unimodular


class ReformulationError(ValueError):
    pass


@dataclass(frozen=True)
class HnfDecomposition:
    U: Matrix
    R: Matrix
    H: Matrix
    gcd_abs: int
    # rows of A are taken in this order before applying [U; R]
    order: tuple[int, ...]

    @property
    def Q(self) -> Matrix:
        return self.U.vstack(self.R)

    def check(self, A) -> None:
        A = as_matrix(A).select_rows(self.order)
        n = A.ncols
        if not is_unimodular(self.Q):
            raise AssertionError("[U; R] is not unimodular")
        if self.Q @ A != self.H.vstack(Matrix.zeros(A.nrows - n, n)):
            raise AssertionError("[U; R] A != [H; 0]")
        if abs(det_exact(self.H)) != self.gcd_abs:
            raise AssertionError("|det H| != gcd_abs")


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def hermite_decompose(A) -> HnfDecomposition:
    """Row-style Hermite normal form with the accumulated transform.

    H is upper triangular with positive diagonal and entries above each pivot
    reduced into [0, pivot).
    """
    A = as_matrix(A).to_int()
    m, n = A.shape
    if rank(A) != n:
        raise ReformulationError("hermite_decompose needs full column rank")
    a = [list(r) for r in A.rows]
    q = [[1 if i == j else 0 for j in range(m)] for i in range(m)]

    def combine(i, k, s, t, u, v):
        # rows (i, k) <- [[s, t], [u, v]] @ rows (i, k); det = +-1
        ai, ak, qi, qk = a[i], a[k], q[i], q[k]
        a[i] = [s * x + t * y for x, y in zip(ai, ak)]
        a[k] = [u * x + v * y for x, y in zip(ai, ak)]
        q[i] = [s * x + t * y for x, y in zip(qi, qk)]
        q[k] = [u * x + v * y for x, y in zip(qi, qk)]

    for j in range(n):
        for k in range(j + 1, m):
            if a[k][j] == 0:
                continue
            x, y = a[j][j], a[k][j]
            g, s, t = _xgcd(x, y)
            combine(j, k, s, t, -y // g, x // g)
        if a[j][j] == 0:
            raise ReformulationError("rank deficiency detected during HNF")
        if a[j][j] < 0:
            a[j] = [-v for v in a[j]]
            q[j] = [-v for v in q[j]]
        p = a[j][j]
        for i in range(j):
            f = a[i][j] // p
            if f:
                a[i] = [u - f * v for u, v in zip(a[i], a[j])]
                q[i] = [u - f * v for u, v in zip(q[i], q[j])]
    H = Matrix(a[:n], n)
    hnf = HnfDecomposition(
        U=Matrix(q[:n], m),
        R=Matrix(q[n:], m),
        H=H,
        gcd_abs=abs(det_exact(H)),
        order=tuple(range(m)),
    )
    return hnf


def basis_decompose(A, split: BasisSplit) -> HnfDecomposition:
    """The triple U = [I 0], R = [-A_N A_B^-1  I], H = A_B on rows ordered B then N.

    Only valid (integral R) when A_B is a maximum-determinant basis of a
    strictly modular A.
    """
    A = as_matrix(A)
    n = A.ncols
    k = A.nrows - n
    ratio = split.A_N @ inverse(split.A_B) if k else Matrix([], n)
    if not ratio.is_integral():
        raise ReformulationError("A_N A_B^-1 is not integral; the basis does not come from a strictly modular profile")
    ratio = ratio.to_int()
    U = Matrix.identity(n).hstack(Matrix.zeros(n, k))
    R = (-ratio).hstack(Matrix.identity(k)) if k else Matrix([], A.nrows)
    H = split.A_B.to_int()
    return HnfDecomposition(U=U, R=R, H=H, gcd_abs=abs(det_exact(H)), order=split.order)


@dataclass(frozen=True)
class CongruentSystem:
    mode: str  # "pure_cone" or "congruency"
    U: Matrix
    R: Matrix
    H: Matrix
    b: tuple[int, ...]  # original row order
    order: tuple[int, ...]
    target_coset: int | None = None
    cosets: object = None  # CosetSystem in congruency mode

    @property
    def b_ordered(self) -> tuple[int, ...]:
        return tuple(self.b[i] for i in self.order)

    def ordered(self, y: Sequence) -> tuple:
        return tuple(y[i] for i in self.order)


def reformulate(A, b: Sequence[int], hnf: HnfDecomposition | None, split: BasisSplit | None,
                gcd_value: int, check_tu: bool = True) -> CongruentSystem:
    """Slack-space system for conv{x in Z^n : Ax <= b}.

    ``gcd_value == 1`` gives the pure cone {y >= 0 : R y = 0} built from the
    generic HNF; otherwise the basis triple is used and the target coset of
    b_B modulo A_B Z^n is recorded.
    """
    from .cosets import coset_representatives

    A = as_matrix(A).to_int()
    b = tuple(int(v) for v in b)
    if solve_exact(A, b) is None:
        raise ReformulationError("b is not in the column span of A")
    if gcd_value == 1:
        if hnf is None:
            hnf = hermite_decompose(A)
        return CongruentSystem("pure_cone", hnf.U, hnf.R, hnf.H, b, hnf.order)
    if split is None:
        raise ReformulationError("the congruency path needs a basis split")
    tri = basis_decompose(A, split)
    if check_tu and tri.R.nrows and not is_totally_unimodular(tri.R):
        raise ReformulationError("R = [-A_N A_B^-1  I] is not totally unimodular")
    cs = coset_representatives(tri.H, delta_cap=None)
    b_B = tuple(b[i] for i in split.basis)
    target = cs.classify(b_B)
    if target == 0:
        raise ReformulationError("b_B lies in A_B Z^n: the apex is integral")
    return CongruentSystem("congruency", tri.U, tri.R, tri.H, b, tri.order, target, cs)


def lift_back(y: Sequence, sys: CongruentSystem) -> tuple:
    """x = H^-1 U (b - y); inverse of the slack map y = b - Ax."""
    yo = sys.ordered([Fraction(v) for v in y])
    bo = sys.b_ordered
    diff = tuple(bi - yi for bi, yi in zip(bo, yo))
    if sys.R.nrows and any(v != 0 for v in sys.R @ diff):
        raise ReformulationError("y violates R (y - b) = 0")
    return inverse(sys.H) @ (sys.U @ diff)
