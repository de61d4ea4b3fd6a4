import pytest

from cogef.circulation import (
    arcs_from_incidence,
    assemble_disjunction,
    build_layered,
    circulation_ef,
    fbar,
    project,
)
from cogef.cosets import coset_representatives, enumerate_patterns
from cogef.linalg import Matrix
from cogef.lp import is_member, lp_exact
from cogef.oracle import verify_circulation

from conftest import TRIANGLE_D


def test_fbar():
    assert [fbar(d) for d in (1, 2, 3, 4)] == [0, 1, 4, 27]


def test_arcs_from_incidence():
    assert arcs_from_incidence(TRIANGLE_D) == [(0, 1), (1, 2), (2, 0)]
    assert arcs_from_incidence(Matrix([[0, 0]])) == [(0, 0), (0, 0)]
    with pytest.raises(ValueError):
        arcs_from_incidence(Matrix([[2], [-1]]))


def test_layered_examples():
    cs = coset_representatives(Matrix([[2]]))
    lg = build_layered(TRIANGLE_D, Matrix([[1, 0, 0]]), cs)
    assert lg.num_nodes == 6 and lg.num_arcs == 6
    loop = build_layered(Matrix([[0]]), Matrix([[1]]), cs)
    assert loop.num_nodes == 2
    assert set(loop.layered_arcs) == {(0, 1), (1, 0)}
    flat = build_layered(TRIANGLE_D, Matrix([[0, 0, 0]]), cs)
    # W = 0: two disjoint copies
    assert all(t % 2 == h % 2 for t, h in flat.layered_arcs)


def test_projection_examples():
    cs = coset_representatives(Matrix([[2]]))
    lg = build_layered(TRIANGLE_D, Matrix([[1, 0, 0]]), cs)
    assert project(lg, [0] * 6) == (0, 0, 0)
    assert project(lg, [1] * 6) == (2, 2, 2)
    loop = build_layered(Matrix([[0]]), Matrix([[1]]), cs)
    x = [1 if a == (0, 1) else 0 for a in loop.layered_arcs]
    assert project(loop, x) == (1,)


def test_delta_one_degenerates_to_the_cone():
    cs = coset_representatives(Matrix([[1]]))
    lg = build_layered(TRIANGLE_D, Matrix([[1, 0, 0]]), cs)
    ef = assemble_disjunction(lg, enumerate_patterns(cs, (0,)))
    assert ef.meta["disjuncts"] == 0
    assert {r.tag for r in ef.rows} == {"flow"}
    assert all(lo == 0 for lo in ef.lower)


def test_loop_fixture_projects_to_odd_ray():
    ef = circulation_ef(Matrix([[0]]), Matrix([[1]]), Matrix([[2]]), (1,))
    assert ef.meta["disjuncts"] == 1
    assert lp_exact(ef, [1], "min").value == 1
    assert lp_exact(ef, [1], "max").status == "unbounded"
    assert is_member(ef, (1,)) and is_member(ef, (2,)) and not is_member(ef, (0,))


def test_triangle_fixture(triangle_fixture):
    D, W, H, f = triangle_fixture
    ef = circulation_ef(D, W, H, f)
    res = lp_exact(ef, [1, 1, 1], "min")
    assert res.value == 3 and res.project(ef.projection) == (1, 1, 1)
    assert ef.meta["size_bound"] == 39
    assert ef.meta["disjuncts"] == 3
    # (t, t, t) with t >= 1 and nothing off the diagonal ray
    assert is_member(ef, (2, 2, 2)) and not is_member(ef, (1, 2, 1))


def test_triangle_matches_brute_force(triangle_fixture):
    D, W, H, f = triangle_fixture
    rep = verify_circulation(circulation_ef(D, W, H, f), D, W, H, f, bound=6, num_objectives=20, seed=3)
    assert rep.passed, rep.to_dict()


def test_congruent_zero_target_is_refused():
    with pytest.raises(ValueError):
        circulation_ef(TRIANGLE_D, Matrix([[1, 0, 0]]), Matrix([[2]]), (0,))


@pytest.mark.parametrize("f", [(1,), (2,)])
def test_delta_three_two_cycles(f):
    # two directed 2-cycles sharing node 0, weights 1 and 2 modulo 3
    arcs = [(0, 1), (1, 0), (0, 2), (2, 0)]
    D = Matrix([[1 if t == v else -1 if h == v else 0 for t, h in arcs] for v in range(3)])
    W = Matrix([[1, 0, 2, 0]])
    ef = circulation_ef(D, W, Matrix([[3]]), f)
    assert ef.num_inequalities <= ef.meta["size_bound"]
    rep = verify_circulation(ef, D, W, Matrix([[3]]), f, bound=5, num_objectives=10, seed=0)
    assert rep.passed, rep.to_dict()


def test_size_bound_counts_inner_rows(triangle_fixture):
    D, W, H, f = triangle_fixture
    cs = coset_representatives(H)
    lg = build_layered(D, W, cs)
    inner = assemble_disjunction(lg, enumerate_patterns(cs, f))
    assert inner.num_inequalities <= inner.meta["size_bound"]
