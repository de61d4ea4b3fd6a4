from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, strategies as st

from cogef.hnf import (
    ReformulationError,
    basis_decompose,
    hermite_decompose,
    lift_back,
    reformulate,
)
from cogef.linalg import Matrix, det_exact, is_unimodular, rank
from cogef.modularity import find_basis, split_rows, subdeterminant_profile
from itertools import combinations

from conftest import cycle_incidence


def minor_gcd(A):
    g = 0
    for rows in combinations(range(A.nrows), A.ncols):
        g = gcd(g, abs(det_exact(A.select_rows(rows))))
    return g


@st.composite
def full_rank_matrices(draw):
    n = draw(st.integers(1, 5))
    m = draw(st.integers(n, 8))
    rows = draw(st.lists(st.lists(st.integers(-4, 4), min_size=n, max_size=n), min_size=m, max_size=m))
    A = Matrix(rows, n)
    if rank(A) < n:
        # shift onto full rank by stacking unit rows over the first n rows
        A = Matrix([[r[j] + (7 if i == j else 0) for j in range(n)] if i < n else list(r)
                    for i, r in enumerate(rows)], n)
    return A


@given(full_rank_matrices())
def test_hnf_invariants(A):
    if rank(A) < A.ncols:
        return
    dec = hermite_decompose(A)
    ordered = A.select_rows(dec.order)
    Q = dec.U.vstack(dec.R)
    assert is_unimodular(Q)
    assert Q @ ordered == dec.H.vstack(Matrix.zeros(A.nrows - A.ncols, A.ncols))
    assert abs(det_exact(dec.H)) == minor_gcd(A) == dec.gcd_abs


def test_hnf_examples():
    d = hermite_decompose(Matrix.identity(2))
    assert d.U == Matrix.identity(2) and d.R.nrows == 0 and d.H == Matrix.identity(2)
    d = hermite_decompose(Matrix([[2]]))
    assert d.H == Matrix([[2]]) and d.R.nrows == 0
    d = hermite_decompose(Matrix([[1], [1]]))
    assert abs(d.H[0, 0]) == 1
    assert d.R in (Matrix([[-1, 1]]), Matrix([[1, -1]]))
    d.check(Matrix([[1], [1]]))


def test_reformulate_examples():
    sys = reformulate(Matrix([[2]]), (1,), None, find_basis(Matrix([[2]]), subdeterminant_profile(Matrix([[2]]))), 2)
    assert sys.mode == "congruency" and sys.R.nrows == 0 and sys.H == Matrix([[2]])
    assert sys.target_coset == sys.cosets.classify((1,)) != 0
    assert lift_back((1,), sys) == (0,)
    assert lift_back((3,), sys) == (-1,)

    C5 = cycle_incidence(5)
    sys = reformulate(C5, (1,) * 5, None, find_basis(C5, subdeterminant_profile(C5)), 2)
    assert sys.mode == "congruency" and sys.R.nrows == 0 and sys.target_coset != 0

    A = Matrix([[1, 0], [0, 1], [1, 1], [-1, 0]])
    b = tuple(A @ (2, -1))
    sys = reformulate(A, b, None, None, 1)
    assert sys.mode == "pure_cone"
    assert lift_back(b, sys) == (0, 0)
    y = tuple(bi - ai for bi, ai in zip(b, A @ (3, 5)))
    assert lift_back(y, sys) == (3, 5)


def test_reformulate_errors():
    A = Matrix([[2]])
    split = find_basis(A, subdeterminant_profile(A))
    with pytest.raises(ReformulationError):
        reformulate(A, (2,), None, split, 2)  # integral apex
    with pytest.raises(ReformulationError):
        reformulate(Matrix([[1], [1]]), (0, 1), None, None, 1)  # b outside the span


def test_basis_triple_rejects_non_strict():
    # A_B = [[1,0],[0,2]] gives A_N A_B^-1 = [1, 1/2]
    A = Matrix([[1, 0], [0, 2], [1, 1]])
    with pytest.raises(ReformulationError):
        basis_decompose(A, split_rows(A, (0, 1)))


@given(full_rank_matrices(), st.lists(st.integers(-3, 3), min_size=5, max_size=5))
def test_lift_back_inverts_slack(A, x):
    if rank(A) < A.ncols or minor_gcd(A) != 1:
        return
    x = tuple(x[:A.ncols])
    b = tuple(A @ x)
    sys = reformulate(A, b, None, None, 1)
    # shift the slack to another lattice point x + e_0
    x2 = (x[0] + 1,) + x[1:]
    y = tuple(bi - ai for bi, ai in zip(b, A @ x2))
    assert lift_back(y, sys) == x2
