"""Instance families: dual complete graphs, the two classical counterexamples,
and odd-cycle edge-node incidence systems."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import comb

from .linalg import Matrix, as_matrix, det_exact, inverse
from .pipeline import GraphHint, ProblemInstance


def complete_graph_arcs(r: int) -> list[tuple[int, int]]:
    """Edges of K_r: star edges (i, r-1) first, then (i, j) for i < j < r-1."""
    return [(i, r - 1) for i in range(r - 1)] + list(combinations(range(r - 1), 2))


def reduced_complete_incidence(r: int) -> Matrix:
    """D_{r-1}: columns e_i - e_j for 0 <= i < j < r-1."""
    cols = list(combinations(range(r - 1), 2))
    return Matrix([[(1 if i == v else -1 if j == v else 0) for i, j in cols] for v in range(r - 1)],
                  len(cols))


def gen_dual_complete(r: int, scale=None, z=None) -> ProblemInstance:
    """A with A^T = scale [-D_{r-1}^T  I] up to one row sign, so M(A^T) is the
    cographic matroid of K_r.

    Rows of A are edges of K_r. Taken literally the rows orient K_r acyclically
    (every edge from lower to higher index), which makes {d : A d <= 0} = {0}
    and P(A, A z) the single point z. Negating the row of edge (0, r-1) closes
    the Hamiltonian cycle 0 -> 1 -> ... -> r-1 -> 0, the orientation becomes
    strongly connected and the cone is full-dimensional. Row negation changes
    neither the matroid nor any subdeterminant in absolute value.

    b = A z; by default z is the first column of scale^{-T} that is not
    integral, which keeps b integral and the apex fractional.
    """
    if not 4 <= r <= 7:
        raise ValueError("r must lie in 4..7")
    n = comb(r - 1, 2)
    B = Matrix.identity(n) if scale is None else as_matrix(scale).to_int()
    if B.shape != (n, n) or det_exact(B) == 0:
        raise ValueError(f"scale must be an invertible {n} x {n} integer matrix")
    D = reduced_complete_incidence(r)
    A = (-D).vstack(Matrix.identity(n)) @ B.T
    A = Matrix([[-v for v in A.row(0)]] + [list(A.row(i)) for i in range(1, A.nrows)], A.ncols)
    if z is None:
        Binv_T = inverse(B.T)
        cols = [Binv_T.col(j) for j in range(n)]
        z = next((c for c in cols if any(Fraction(v).denominator != 1 for v in c)), cols[0])
    b = A @ tuple(z)
    if any(Fraction(v).denominator != 1 for v in b):
        raise ValueError("A z is not integral")
    hint = GraphHint(r, tuple(complete_graph_arcs(r)), None)
    label = f"dual-complete-r{r}-det{abs(det_exact(B))}"
    return ProblemInstance(A, tuple(int(v) for v in b), hint, label)


def complete_digraph_arcs(nodes: int) -> list[tuple[int, int]]:
    return [(v, w) for v in range(nodes) for w in range(nodes) if v != w]


def _cevallos(nodes: int) -> ProblemInstance:
    if nodes < 2 or nodes % 2:
        raise ValueError("the Cevallos family needs an even node count >= 2")
    arcs = complete_digraph_arcs(nodes)
    na, nv = len(arcs), nodes - 1
    # node-arc incidence without node 0, transposed: row per arc
    DbarT = [[(1 if t == v else -1 if h == v else 0) for v in range(1, nodes)] for t, h in arcs]
    rows = []
    for a in range(na):
        rows.append([-(a == j) for j in range(na)] + DbarT[a] + [0])
    for a in range(na):
        rows.append([-(a == j) for j in range(na)] + [0] * nv + [0])
    rows.append([0] * na + [1] * nv + [-2])
    rows.append([0] * na + [-1] * nv + [2])
    b = [0] * (2 * na) + [1, -1]
    return ProblemInstance(Matrix([[int(v) for v in r] for r in rows]), tuple(b), None, f"cevallos-{nodes}")


def _jia(n: int) -> ProblemInstance:
    if n < 2:
        raise ValueError("the Jia family needs n >= 2")
    edges = [(u, n + v) for u in range(n) for v in range(n)]
    DG = [[(1 if t == x else -1 if h == x else 0) for t, h in edges] for x in range(2 * n)]
    ne = len(edges)
    gamma = [1] + [0] * (ne - 1)  # first edge red, all others blue
    rows = [r + [0] for r in DG]
    rows += [[-v for v in r] + [0] for r in DG]
    rows += [[-(i == j) for j in range(ne)] + [0] for i in range(ne)]
    rows.append(gamma + [-2])
    rows.append([-g for g in gamma] + [2])
    demand = [Fraction(sum(r), n) for r in DG]
    if any(d.denominator != 1 for d in demand):
        raise AssertionError("degree vector not divisible by n")
    b = [int(d) for d in demand] + [-int(d) for d in demand] + [0] * ne + [1, -1]
    return ProblemInstance(Matrix([[int(v) for v in r] for r in rows]), tuple(b), None, f"jia-{n}")


def gen_counterexample(kind: str, size: int) -> ProblemInstance:
    if kind == "cevallos":
        return _cevallos(size)
    if kind == "jia":
        return _jia(size)
    raise ValueError(f"unknown counterexample family {kind!r}")


def gen_odd_cycle_stab(k: int) -> ProblemInstance:
    """Edge-node incidence of the cycle C_k with b = 1.

    C_k has a single odd cycle, so the maximum number of node-disjoint odd
    cycles is 1 and one deleted node makes it bipartite. Both numbers are only
    checked by brute force in the tests; no general routine is provided.
    """
    if k % 2 == 0 or not 3 <= k <= 9:
        raise ValueError("k must be odd with 3 <= k <= 9")
    rows = [[1 if v in (e, (e + 1) % k) else 0 for v in range(k)] for e in range(k)]
    return ProblemInstance(Matrix(rows), (1,) * k, None, f"odd-cycle-{k}")
