from itertools import combinations, permutations, product

import pytest
from hypothesis import given, settings, strategies as st

from cogef.generators import reduced_complete_incidence
from cogef.linalg import Matrix, nullspace, rank, solve_exact
from cogef.realize import (
    NotGraphic,
    SigningError,
    incidence_matrix,
    is_cographic_dual,
    realization_from_arcs,
    realize_graphic,
    realize_incidence,
    sign_fix,
)


# --- independent helpers -------------------------------------------------------

def fundamental(node_count, tree, others):
    """S with [S | I] representing M(G) for G = others + tree (tree arcs last)."""
    rows = lambda arcs: [[(1 if t == v else -1 if h == v else 0) for t, h in arcs] for v in range(node_count - 1)]
    ET = Matrix(rows(tree), len(tree))
    cols = []
    for t, h in others:
        rhs = [(1 if t == v else -1 if h == v else 0) for v in range(node_count - 1)]
        cols.append(solve_exact(ET, rhs))
    return Matrix([[int(c[i]) for c in cols] for i in range(len(tree))], len(others))


def dual_form(S):
    """[S | I_k] (nontree, tree) -> [-S^T | I_n] representing the dual, elements (tree, nontree)."""
    return (-S.T).hstack(Matrix.identity(S.ncols))


def standard(S):
    return S.hstack(Matrix.identity(S.nrows))


def prufer_trees(nodes):
    if nodes == 1:
        yield []
        return
    if nodes == 2:
        yield [(0, 1)]
        return
    for seq in product(range(nodes), repeat=nodes - 2):
        degree = [1] * nodes
        for v in seq:
            degree[v] += 1
        edges = []
        seq = list(seq)
        for v in seq:
            leaf = min(u for u in range(nodes) if degree[u] == 1)
            edges.append((leaf, v))
            degree[leaf] -= 1
            degree[v] -= 1
        u, w = [x for x in range(nodes) if degree[x] == 1]
        edges.append((u, w))
        yield edges


def is_path(edges):
    if not edges:
        return True
    deg = {}
    for u, v in edges:
        deg[u] = deg.get(u, 0) + 1
        deg[v] = deg.get(v, 0) + 1
    return max(deg.values()) <= 2 and len(deg) == len(edges) + 1


def brute_graphic(supports, k):
    """Is there a labelled tree on k edges in which every support is a path?"""
    for tree in prufer_trees(k + 1):
        for perm in permutations(range(k)):
            lab = [tree[perm[e]] for e in range(k)]
            if all(is_path([lab[e] for e in sup]) for sup in supports):
                return True
    return False


def bases(M):
    r = rank(M)
    return {c for c in combinations(range(M.ncols), r) if rank(M.select_cols(c)) == r}


def same_kernel(D, R):
    kd, kr = nullspace(D), nullspace(R)
    if len(kd) != len(kr):
        return False
    return all(all(v == 0 for v in R @ x) for x in kd) and all(all(v == 0 for v in D @ x) for x in kr)


@st.composite
def graphs(draw, max_nodes=5, max_extra=5):
    nodes = draw(st.integers(2, max_nodes))
    tree = []
    for v in range(1, nodes):
        p = draw(st.integers(0, v - 1))
        tree.append((p, v) if draw(st.booleans()) else (v, p))
    extra = draw(st.lists(st.tuples(st.integers(0, nodes - 1), st.integers(0, nodes - 1)),
                          min_size=0, max_size=max_extra))
    return nodes, tree, extra


# --- examples -----------------------------------------------------------------

def test_identity_realizes_a_forest():
    real = realize_graphic(Matrix.identity(2))
    assert real.node_count == 3
    assert rank(real.E) == 2


def test_k4_self_dual():
    D3 = reduced_complete_incidence(4)
    R = (-D3.T).hstack(Matrix.identity(3))
    real = realize_graphic(R)
    assert real.node_count == 4 and len(real.arcs) == 6
    assert bases(real.full_incidence) == bases(R)
    D, _, _ = realize_incidence(R)
    assert same_kernel(D, R)


def test_empty_r_gives_loops():
    real = realize_graphic(Matrix([], 3))
    assert real.node_count == 1 and all(t == h for t, h in real.arcs)


def test_sign_fix_examples():
    real = realization_from_arcs(2, [(1, 0), (0, 1)])  # ratio [-1]
    fix = sign_fix(Matrix([[1]]), real)
    assert fix.P1 == Matrix([[-1]]) and fix.P2 == Matrix([[1]])

    S_real = fundamental(3, [(0, 2), (1, 2)], [(1, 0), (1, 2)])
    real = realization_from_arcs(3, [(1, 0), (1, 2), (0, 2), (1, 2)])
    assert S_real == Matrix([[-1, 0], [1, 1]])
    fix = sign_fix(S_real, real)
    assert fix.P1 == Matrix.identity(2) and fix.P2 == Matrix.identity(2)
    target = Matrix([[1, 0], [1, 1]])
    fix = sign_fix(target, real)
    assert fix.P1 @ target @ fix.P2 == S_real


def test_sign_fix_spec_example():
    target = Matrix([[1, -1], [0, 1]])
    realized = Matrix([[-1, 1], [0, 1]])
    # a graph whose fundamental matrix is `realized`: tree 0->1 (t0), 1->2 (t1)
    tree = [(0, 1), (1, 2)]
    others = [(1, 0), (0, 2)]
    assert fundamental(3, tree, others) == realized
    fix = sign_fix(target, realization_from_arcs(3, others + tree))
    assert fix.P1 == Matrix.diag([-1, 1]) and fix.P2 == Matrix.identity(2)


def test_sign_fix_rejects_inconsistent_signs():
    # [[1, 1], [1, -1]] has determinant -2 and no +-1 rescaling to a network matrix
    tree = [(0, 1), (1, 2)]
    others = [(0, 2), (0, 2)]
    with pytest.raises(SigningError):
        sign_fix(Matrix([[1, 1], [1, -1]]), realization_from_arcs(3, others + tree))


def _k33():
    a, b = [0, 1, 2], [3, 4, 5]
    edges = [(u, v) for u in a for v in b]
    tree = [(0, 3), (0, 4), (0, 5), (1, 3), (2, 3)]
    others = [e for e in edges if e not in tree]
    return 6, tree, others


def _k5():
    edges = list(combinations(range(5), 2))
    tree = [(i, 4) for i in range(4)]
    return 5, tree, [e for e in edges if e not in tree]


@pytest.mark.parametrize("graph", [_k5, _k33], ids=["K5", "K33"])
def test_cographic_of_nonplanar_is_not_graphic(graph):
    nodes, tree, others = graph()
    S = fundamental(nodes, tree, others)
    assert realize_graphic(standard(S)).node_count == nodes  # the graph itself
    with pytest.raises(NotGraphic):
        realize_graphic(dual_form(S))
    ok, _, _ = is_cographic_dual(dual_form(S))
    assert not ok


def test_planar_dual_is_graphic():
    # cube graph: planar, so its bond matroid is graphic
    edges = [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4), (0, 4), (1, 5), (2, 6), (3, 7)]
    tree = [(0, 1), (1, 2), (2, 3), (0, 4), (4, 5), (5, 6), (6, 7)]
    others = [e for e in edges if e not in tree]
    R = dual_form(fundamental(8, tree, others))
    D, real, _ = realize_incidence(R)
    assert same_kernel(D, R)
    assert bases(real.full_incidence) == bases(R)


def test_non_regular_scaling_is_rejected():
    # U_{2,4} has no graphic (or regular) representation
    R = Matrix([[1, 1, 1, 0], [1, 2, 0, 1]])
    ok, reason, _ = is_cographic_dual(R)
    assert not ok and "regular" in reason


# --- properties -----------------------------------------------------------------

@settings(max_examples=60)
@given(st.integers(1, 4).flatmap(lambda k: st.tuples(
    st.just(k), st.lists(st.lists(st.booleans(), min_size=k, max_size=k), min_size=0, max_size=5))))
def test_support_realization_matches_brute_force(data):
    k, cols = data
    supports = [frozenset(i for i in range(k) if c[i]) for c in cols]
    S = Matrix([[1 if c[i] else 0 for c in cols] for i in range(k)], len(cols))
    try:
        realize_graphic(standard(S))
        found = True
    except NotGraphic:
        found = False
    assert found == brute_graphic(supports, k)


@settings(max_examples=60)
@given(graphs(), st.data())
def test_graphic_roundtrip_matroid_and_kernel(graph, data):
    nodes, tree, extra = graph
    S = fundamental(nodes, tree, extra)
    # random +-1 rescaling keeps the matroid
    r = [data.draw(st.sampled_from([1, -1])) for _ in range(S.nrows)]
    c = [data.draw(st.sampled_from([1, -1])) for _ in range(S.ncols)]
    S = Matrix.diag(r) @ S @ Matrix.diag(c) if S.ncols else S
    R = standard(S)
    D, real, fix = realize_incidence(R)
    assert same_kernel(D, R)
    if R.ncols <= 12:
        assert bases(real.full_incidence) == bases(R)
