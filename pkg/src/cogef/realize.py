"""Graph realization of [S | I] and the sign-fixed node-arc incidence matrix.

The identity columns are read as the edges of a spanning tree; column j of
S then has to be the fundamental circuit of a non-tree edge, i.e. its
support must be a path in the tree.  Trees are grown leaf by leaf with a
canonical ordering so that every rooted tree is produced once, and a partial
tree is abandoned as soon as the placed edges of some support stop forming a
path.  The search is exhaustive, so failure certifies that the matroid is
not graphic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .linalg import Matrix, as_matrix, inverse

DEFAULT_SEARCH_BUDGET = 5_000_000


class NotGraphic(ValueError):
    """The column matroid of R is not graphic (exhaustive certificate)."""


class RealizationBudgetExceeded(RuntimeError):
    pass


class SigningError(RuntimeError):
    """The realization and the target differ by more than +-1 scalings."""


@dataclass(frozen=True)
class GraphRealization:
    node_count: int
    arcs: tuple[tuple[int, int], ...]
    E: Matrix
    full_incidence: Matrix


@dataclass(frozen=True)
class SignFix:
    P1: Matrix
    P2: Matrix


def _incidence(node_count: int, arcs: Sequence[tuple[int, int]]) -> Matrix:
    rows = [[0] * len(arcs) for _ in range(node_count)]
    for a, (t, h) in enumerate(arcs):
        if t != h:
            rows[t][a] += 1
            rows[h][a] -= 1
    return Matrix(rows, len(arcs))


def realization_from_arcs(node_count: int, arcs: Sequence[tuple[int, int]]) -> GraphRealization:
    arcs = tuple((int(t), int(h)) for t, h in arcs)
    for t, h in arcs:
        if not (0 <= t < node_count and 0 <= h < node_count):
            raise ValueError(f"arc ({t}, {h}) leaves the node range")
    full = _incidence(node_count, arcs)
    E = Matrix(full.rows[:-1], len(arcs))
    return GraphRealization(node_count, arcs, E, full)


def _split_standard_form(R) -> tuple[Matrix, int, int]:
    R = as_matrix(R).to_int()
    k, m = R.shape
    n = m - k
    if n < 0 or R.select_cols(range(n, m)) != Matrix.identity(k):
        raise ValueError("R must have the form [S | I]")
    return R.select_cols(range(n)), n, k


def _ratio(real: GraphRealization, n: int) -> Matrix:
    """E2^-1 E1 for the tree block E2 (last columns)."""
    E = real.E
    m = E.ncols
    E2 = E.select_cols(range(n, m))
    try:
        inv = inverse(E2)
    except ZeroDivisionError:
        raise ValueError("the identity columns do not form a spanning tree") from None
    return inv @ E.select_cols(range(n))


def realize_graphic(R, hint: tuple[int, Sequence[tuple[int, int]]] | None = None,
                    budget: int = DEFAULT_SEARCH_BUDGET) -> GraphRealization:
    """Find a graph whose cycle matroid is the column matroid of R = [S | I].

    ``hint`` is ``(node_count, arcs)`` with one arc per column of R; it is
    validated and then used as is.
    """
    S, n, k = _split_standard_form(R)
    m = n + k
    if hint is not None:
        node_count, arcs = hint
        if len(arcs) != m or node_count != k + 1:
            raise ValueError(f"hint needs {k + 1} nodes and {m} arcs")
        real = realization_from_arcs(node_count, arcs)
        if _ratio(real, n).support() != S.support():
            raise ValueError("hint graph does not realize the matroid of R")
        return real
    if k == 0:
        return realization_from_arcs(1, [(0, 0)] * m)
    supports = [frozenset(i for i in range(k) if S[i, j]) for j in range(n)]
    ends = _realize_tree(k, supports, budget)
    if ends is None:
        raise NotGraphic("no graph realizes the column matroid of R")
    arcs = [_path_ends(ends, sup) for sup in supports] + list(ends)
    real = realization_from_arcs(k + 1, arcs)
    if _ratio(real, n).support() != S.support():
        raise AssertionError("realization search produced an inconsistent tree")
    return real


def _path_ends(ends, sup) -> tuple[int, int]:
    if not sup:
        return (0, 0)
    deg: dict[int, int] = {}
    for e in sup:
        for v in ends[e]:
            deg[v] = deg.get(v, 0) + 1
    a, b = sorted(v for v, d in deg.items() if d == 1)
    return (a, b)


def _realize_tree(k: int, supports: list[frozenset], budget: int):
    """Tree on nodes 0..k (edge e = tree edge e) in which every support is a path.

    Reductions run to a fixpoint first, each preserving realizability:
    coloops become pendant edges, edges with equal support membership are
    merged into one series class, and an edge lying in a single support is
    removed and later re-attached at an end of that support's path.  The
    remaining 1-sum components are searched separately and glued at node 0.
    Returns the endpoint pairs or None.
    """
    alive = set(range(k))
    sups = [set(s) for s in supports]
    ops: list[tuple] = []
    changed = True
    while changed:
        changed = False
        # membership by support content, so duplicated supports count once
        live = {frozenset(s) for s in sups if len(s) > 1}
        sig = {e: frozenset(s for s in live if e in s) for e in alive}
        for e in sorted(alive):
            if not sig[e]:
                ops.append(("pendant", e))
                alive.discard(e)
                for s in sups:
                    s.discard(e)
                changed = True
        groups: dict[frozenset, list[int]] = {}
        for e in sorted(alive):
            groups.setdefault(sig[e], []).append(e)
        for g, members in groups.items():
            if len(members) > 1:
                ops.append(("series", members[0], members[1:]))
                for e in members[1:]:
                    alive.discard(e)
                    for s in sups:
                        s.discard(e)
                changed = True
        if changed:
            continue
        for e in sorted(alive):
            if len(sig[e]) == 1:
                (sup,) = sig[e]
                rest = sup - {e}
                ops.append(("extend", e, rest))
                alive.discard(e)
                for s in sups:
                    s.discard(e)
                changed = True
                break
    reduced = sorted({frozenset(s) for s in sups if len(s) > 1}, key=sorted)
    parent = {e: e for e in alive}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for s in reduced:
        it = iter(s)
        first = find(next(it))
        for e in it:
            parent[find(e)] = first
    comps: dict[int, list[int]] = {}
    for e in sorted(alive):
        comps.setdefault(find(e), []).append(e)
    ends: dict[int, tuple[int, int]] = {}
    counter = [1]

    def fresh() -> int:
        counter[0] += 1
        return counter[0] - 1

    remaining = [budget]
    for comp in comps.values():
        order = _bfs_order(comp, reduced)
        local = {e: i for i, e in enumerate(order)}
        csups = [frozenset(local[e] for e in s) for s in reduced if next(iter(s)) in local]
        loc_ends = _grow_tree(len(order), csups, remaining)
        if loc_ends is None:
            return None
        # each local edge created its head node; tails may come from any edge
        node_map = {0: 0}
        for _, v in loc_ends:
            node_map[v] = fresh()
        for i, (u, v) in enumerate(loc_ends):
            ends[order[i]] = (node_map[u], node_map[v])
    for op in reversed(ops):
        if op[0] == "pendant":
            ends[op[1]] = (0, fresh())
        elif op[0] == "series":
            rep, others = op[1], op[2]
            u, v = ends[rep]
            cur = u
            for e in [rep] + others[:-1]:
                nxt = fresh()
                ends[e] = (cur, nxt)
                cur = nxt
            ends[others[-1]] = (cur, v)
        else:
            e, rest = op[1], op[2]
            _, b = _path_ends(ends, rest)
            ends[e] = (b, fresh())
    return [ends[e] for e in range(k)]


def _bfs_order(comp: list[int], sups: list[frozenset]) -> list[int]:
    """Edges ordered so that edges sharing supports are placed close together."""
    inside = set(comp)
    nbrs: dict[int, set] = {e: set() for e in comp}
    for s in sups:
        if s <= inside:
            for e in s:
                nbrs[e] |= s - {e}
    start = max(comp, key=lambda e: (len(nbrs[e]), -e))
    order, seen, queue = [], {start}, [start]
    while queue:
        e = queue.pop(0)
        order.append(e)
        for f in sorted(nbrs[e], key=lambda f: (-len(nbrs[f]), f)):
            if f not in seen:
                seen.add(f)
                queue.append(f)
    return order


def _grow_tree(k: int, supports: list[frozenset], budget: list[int]):
    """Exhaustive leaf-by-leaf search on one component; budget is shared."""
    member: list[list[int]] = [[] for _ in range(k)]
    for p, sup in enumerate(supports):
        for e in sup:
            member[e].append(p)
    ends: list[tuple[int, int] | None] = [None] * k
    path: list[tuple[int, int] | None] = [None] * len(supports)
    minnode = [0] * k
    placed = [False] * k
    nnodes = 1

    def rec(count: int) -> bool:
        nonlocal nnodes
        if count == k:
            return True
        budget[0] -= 1
        if budget[0] < 0:
            raise RealizationBudgetExceeded("graph realization search exceeded its step budget")
        unplaced = [e for e in range(k) if not placed[e]]
        for e in unplaced:
            new = nnodes
            for u in range(minnode[e], nnodes):
                saved = []
                ok = True
                for p in member[e]:
                    cur = path[p]
                    if cur is None:
                        nxt = (u, new)
                    elif cur[0] == u:
                        nxt = (new, cur[1])
                    elif cur[1] == u:
                        nxt = (cur[0], new)
                    else:
                        ok = False
                        break
                    saved.append((p, cur))
                    path[p] = nxt
                if ok:
                    # canonical order: unplaced edges smaller than e may only
                    # hang from nodes created from now on
                    lowered = []
                    for e2 in unplaced:
                        if e2 < e and minnode[e2] < new:
                            lowered.append((e2, minnode[e2]))
                            minnode[e2] = new
                    placed[e] = True
                    ends[e] = (u, new)
                    nnodes += 1
                    if rec(count + 1):
                        return True
                    nnodes -= 1
                    placed[e] = False
                    ends[e] = None
                    for e2, old in lowered:
                        minnode[e2] = old
                for p, cur in saved:
                    path[p] = cur
        return False

    return ends if rec(0) else None


def sign_fix(target_S, realized: GraphRealization) -> SignFix:
    """Diagonal +-1 matrices with P1 S P2 = E2^-1 E1.

    Signs are propagated over the bipartite graph of nonzero entries; each
    component is anchored at its first column (or its row if it has none).
    """
    S = as_matrix(target_S).to_int()
    k, n = S.shape
    T = _ratio(realized, n)
    if T.support() != S.support():
        raise SigningError("support mismatch between the target and the realization")
    p1: list[int | None] = [None] * k
    p2: list[int | None] = [None] * n
    col_nz = [[i for i in range(k) if S[i, j]] for j in range(n)]
    row_nz = [[j for j in range(n) if S[i, j]] for i in range(k)]

    def spread(stack):
        while stack:
            kind, idx = stack.pop()
            if kind == "c":
                for i in col_nz[idx]:
                    if p1[i] is None:
                        p1[i] = int(T[i, idx] / (S[i, idx] * p2[idx]))
                        stack.append(("r", i))
            else:
                for j in row_nz[idx]:
                    if p2[j] is None:
                        p2[j] = int(T[idx, j] / (S[idx, j] * p1[idx]))
                        stack.append(("c", j))

    for j in range(n):
        if p2[j] is None:
            p2[j] = 1
            spread([("c", j)])
    for i in range(k):
        if p1[i] is None:
            p1[i] = 1
    P1, P2 = Matrix.diag(p1), Matrix.diag(p2)
    if k and n and P1 @ S @ P2 != T:
        raise SigningError("no consistent signing; the representations are not projectively equal")
    return SignFix(P1 if k else Matrix([], 0), P2)


def normalize_scaling(S) -> tuple[Matrix, list, list]:
    """Positive row/column scalings making S unit along a spanning forest of
    its bipartite support graph.  Returns (S', row_scale, col_scale) with
    S' = diag(row_scale) S diag(col_scale); a {0, +-1} matrix is unchanged.

    A graphic matroid is regular and hence uniquely representable, so if
    [S | I] represents one, every nonzero entry of S' is +-1.
    """
    from fractions import Fraction

    S = as_matrix(S)
    k, n = S.shape
    rs: list = [None] * k
    cs: list = [None] * n
    for j0 in range(n):
        if cs[j0] is not None:
            continue
        cs[j0] = Fraction(1)
        stack = [("c", j0)]
        while stack:
            kind, idx = stack.pop()
            if kind == "c":
                for i in range(k):
                    v = S[i, idx]
                    if v and rs[i] is None:
                        rs[i] = 1 / (abs(Fraction(v)) * cs[idx])
                        stack.append(("r", i))
            else:
                for j in range(n):
                    v = S[idx, j]
                    if v and cs[j] is None:
                        cs[j] = 1 / (abs(Fraction(v)) * rs[idx])
                        stack.append(("c", j))
    rs = [Fraction(1) if r is None else r for r in rs]
    out = Matrix([[rs[i] * S[i, j] * cs[j] for j in range(n)] for i in range(k)], n)
    return out, rs, cs


def is_cographic_dual(R, hint=None, budget: int = DEFAULT_SEARCH_BUDGET) -> tuple[bool, str, GraphRealization | None]:
    """Decide whether the column matroid of R = [S | I] (rational) is graphic.

    Returns (answer, reason, realization of the normalized support).
    Raises RealizationBudgetExceeded when the search gives up.
    """
    R = as_matrix(R)
    k, m = R.shape
    n = m - k
    S = R.select_cols(range(n))
    Sn, _, _ = normalize_scaling(S)
    if any(v not in (0, 1, -1) for row in Sn.rows for v in row):
        return False, "the matroid is not regular (scaled entries outside {0, +-1})", None
    Rn = Sn.to_int().hstack(Matrix.identity(k))
    real = None
    if hint is not None:
        try:
            real = realize_graphic(Rn, hint)
        except ValueError:
            real = None
    if real is None:
        try:
            real = realize_graphic(Rn, None, budget)
        except NotGraphic:
            return False, "the support of the fundamental circuits is not graphic", None
    try:
        sign_fix(Sn.to_int(), real)
    except SigningError:
        return False, "no consistent signing of the realization exists", None
    return True, f"realized on {real.node_count} nodes", real


def incidence_matrix(realized: GraphRealization, fix: SignFix) -> Matrix:
    """D = [E; -1^T E] blockdiag(P2^-1, P1), a node-arc incidence matrix with ker D = ker R."""
    full = realized.full_incidence
    n = fix.P2.nrows
    scale = [fix.P2[j, j] for j in range(n)] + [fix.P1[i, i] for i in range(fix.P1.nrows)]
    return Matrix([[v * s for v, s in zip(row, scale)] for row in full.rows], full.ncols)


def realize_incidence(R, hint=None, budget: int = DEFAULT_SEARCH_BUDGET) -> tuple[Matrix, GraphRealization, SignFix]:
    """Convenience: realization, signing and the final incidence matrix D."""
    S, _, _ = _split_standard_form(R)
    real = realize_graphic(R, hint, budget)
    fix = sign_fix(S, real)
    return incidence_matrix(real, fix), real, fix
