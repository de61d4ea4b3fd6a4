import pytest

from cogef.generators import gen_dual_complete, reduced_complete_incidence
from cogef.linalg import Matrix, det_exact
from cogef.modularity import (
    EnumerationCapExceeded,
    find_basis,
    first_basis,
    is_totally_unimodular,
    subdeterminant_profile,
)

from conftest import cycle_incidence


def test_profile_examples():
    p = subdeterminant_profile(Matrix([[2]]))
    assert (p.delta, p.gcd, p.strictly_modular) == (2, 2, True)
    p = subdeterminant_profile(Matrix([[1, 0], [0, 2], [1, 1]]))
    assert (p.delta, p.gcd, p.strictly_modular) == (2, 1, False)
    p = subdeterminant_profile(cycle_incidence(5))
    assert (p.delta, p.gcd, p.strictly_modular) == (2, 2, True)


def test_profile_rejects_rank_deficient():
    with pytest.raises(ValueError):
        subdeterminant_profile(Matrix([[1, 1], [2, 2]]))


def test_profile_cap():
    with pytest.raises(EnumerationCapExceeded):
        subdeterminant_profile(Matrix.identity(6).vstack(Matrix.identity(6)), enum_cap=10)


def test_find_basis_examples():
    A = Matrix([[2]])
    assert find_basis(A, subdeterminant_profile(A)).basis == (0,)
    A = Matrix([[1, 0], [0, 1], [1, 1]])
    assert find_basis(A, subdeterminant_profile(A)).basis == (0, 1)
    inst = gen_dual_complete(4, Matrix.diag([2, 1, 1]))
    split = find_basis(inst.A, subdeterminant_profile(inst.A))
    assert abs(det_exact(split.A_B)) == 2


def test_first_basis_is_greedy():
    split = first_basis(Matrix([[1, 1], [2, 2], [0, 1]]))
    assert split.basis == (0, 2)
    assert split.nonbasis == (1,)


def test_tu_examples():
    # node-arc incidence of a digraph on 5 nodes
    arcs = [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 1), (0, 4)]
    D = Matrix([[1 if t == v else -1 if h == v else 0 for t, h in arcs] for v in range(5)])
    assert is_totally_unimodular(D)
    assert not is_totally_unimodular(Matrix([[1, 1], [-1, 1]]))
    D3 = reduced_complete_incidence(4)
    assert is_totally_unimodular((-D3.T).hstack(Matrix.identity(3)))


def test_dual_complete_profiles():
    for r, s in ((4, 2), (4, 3), (5, 2)):
        n = (r - 1) * (r - 2) // 2
        inst = gen_dual_complete(r, Matrix.diag([s] + [1] * (n - 1)))
        p = subdeterminant_profile(inst.A)
        assert p.strictly_modular and p.delta == s
    p = subdeterminant_profile(gen_dual_complete(4).A)
    assert p.gcd == 1
