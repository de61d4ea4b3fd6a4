"""Extended formulation of nonnegative integer circulations under a congruency.

    S = conv{ y in Z^A_+ : D y = 0,  W y = f  (mod H Z^d) }

Flows are lifted to a layered copy of the graph whose layers are the cosets
of Z^d / H Z^d; a circulation with the right coset is a sum of segment flows
that climb through the layers according to a zero-sum-free pattern, and the
union over patterns and start nodes is convexified disjunctively.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

from .cosets import DEFAULT_DELTA_CAP, CosetSystem, coset_representatives, enumerate_patterns
from .formulation import ExtendedFormulation
from .linalg import Matrix, as_matrix

DEFAULT_ASSIGNMENT_CAP = 100_000


def fbar(delta: int) -> int:
    return (delta - 1) ** (delta - 1) if delta > 1 else 0


def arcs_from_incidence(D, loop_node: int = 0) -> list[tuple[int, int]]:
    """Read (tail, head) pairs off a +1/-1 incidence matrix; zero columns become loops."""
    D = as_matrix(D).to_int()
    arcs = []
    for j in range(D.ncols):
        col = D.col(j)
        tails = [i for i, v in enumerate(col) if v == 1]
        heads = [i for i, v in enumerate(col) if v == -1]
        others = [v for v in col if v not in (0, 1, -1)]
        if not tails and not heads:
            arcs.append((loop_node, loop_node))
        elif len(tails) == 1 and len(heads) == 1 and not others:
            arcs.append((tails[0], heads[0]))
        else:
            raise ValueError(f"column {j} is not an incidence column")
    return arcs


@dataclass(frozen=True)
class LayeredGraph:
    node_count: int  # base nodes
    arcs: tuple[tuple[int, int], ...]  # base arcs
    cosets: CosetSystem
    arc_class: tuple[int, ...]  # coset index of each W column
    layered_arcs: tuple[tuple[int, int], ...]  # over nodes v * delta + i
    origin: tuple[int, ...]

    @property
    def delta(self) -> int:
        return self.cosets.delta

    @property
    def num_nodes(self) -> int:
        return self.node_count * self.delta

    @property
    def num_arcs(self) -> int:
        return len(self.layered_arcs)

    def node(self, v: int, i: int) -> int:
        return v * self.delta + i

    def incidence(self) -> Matrix:
        rows = [[0] * self.num_arcs for _ in range(self.num_nodes)]
        for a, (t, h) in enumerate(self.layered_arcs):
            if t != h:
                rows[t][a] += 1
                rows[h][a] -= 1
        return Matrix(rows, self.num_arcs)


def build_layered(D, W, cs: CosetSystem, arcs: Sequence[tuple[int, int]] | None = None) -> LayeredGraph:
    """Layer copy (v, g^i) of each node; arc (v, w) in layer i ends in the layer of g^i + W_(v,w)."""
    D = as_matrix(D)
    W = as_matrix(W).to_int()
    if arcs is None:
        arcs = arcs_from_incidence(D)
    arcs = tuple(tuple(a) for a in arcs)
    if W.ncols != len(arcs):
        raise ValueError("W needs one column per arc")
    if W.nrows != cs.H.nrows:
        raise ValueError("W and H have different row counts")
    delta = cs.delta
    classes = tuple(cs.classify(W.col(a)) for a in range(len(arcs)))
    lay, origin = [], []
    for a, (v, w) in enumerate(arcs):
        for i in range(delta):
            lay.append((v * delta + i, w * delta + cs.add(i, classes[a])))
            origin.append(a)
    return LayeredGraph(D.nrows, arcs, cs, classes, tuple(lay), tuple(origin))


def project(lg: LayeredGraph, x: Sequence) -> tuple:
    """pi: add up the delta layer copies of each base arc."""
    d = lg.delta
    return tuple(sum(x[a * d + i] for i in range(d)) for a in range(len(lg.arcs)))


def _prefix_layers(cs: CosetSystem, rho: Sequence[int]) -> list[int]:
    out = [0]
    for t in rho:
        out.append(cs.add(out[-1], t))
    return out


def assemble_disjunction(lg: LayeredGraph, omega: Sequence[Sequence[int]],
                         cap: int = DEFAULT_ASSIGNMENT_CAP) -> ExtendedFormulation:
    """conv of the union over tau|rho of the segment-flow polyhedra, in x over A'.

    With delta == 1 this is just {x >= 0 : D' x = 0}.
    """
    ef = ExtendedFormulation()
    nA, nV = lg.num_arcs, lg.num_nodes
    out_arcs = [[] for _ in range(nV)]
    in_arcs = [[] for _ in range(nV)]
    for a, (t, h) in enumerate(lg.layered_arcs):
        if t != h:
            out_arcs[t].append(a)
            in_arcs[h].append(a)

    def flow_row(cols, u):
        row = {cols[a]: 1 for a in out_arcs[u]}
        for a in in_arcs[u]:
            row[cols[a]] = row.get(cols[a], 0) - 1
        return row

    if lg.delta == 1:
        xl = ef.add_vars("xl", nA, nonneg=True)
        for u in range(nV):
            ef.add_row(flow_row(xl, u), "==", 0, "flow")
        ef.projection = xl
        ef.meta.update(delta=1, disjuncts=0, size_bound=nA)
        return ef

    total = sum(lg.node_count ** len(rho) for rho in omega)
    if total > cap:
        raise ValueError(f"{total} pattern assignments exceed the cap {cap}")
    xl = ef.add_vars("xl", nA)
    assignments = []
    for rho in omega:
        for tau in product(range(lg.node_count), repeat=len(rho)):
            assignments.append((tuple(rho), tau))
    lams, xts = [], []
    for d, (rho, tau) in enumerate(assignments):
        lam = ef.add_var(f"lam[{d}]", nonneg=True)
        xt = ef.add_vars(f"xt[{d}]", nA)
        segs = [ef.add_vars(f"xs[{d},{j}]", nA, nonneg=True) for j in range(len(rho))]
        lams.append(lam)
        xts.append(xt)
        tag = f"disjunct:{d}"
        for a in range(nA):
            row = {s[a]: 1 for s in segs}
            row[xt[a]] = -1
            ef.add_row(row, "==", 0, tag)
        layers = _prefix_layers(lg.cosets, rho)
        for j, v in enumerate(tau):
            src, dst = lg.node(v, layers[j]), lg.node(v, layers[j + 1])
            for u in range(nV):
                row = flow_row(segs[j], u)
                demand = (1 if u == src else 0) - (1 if u == dst else 0)
                if demand:
                    row[lam] = row.get(lam, 0) - demand
                if row:
                    ef.add_row(row, "==", 0, tag)
    for a in range(nA):
        row = {xt[a]: 1 for xt in xts}
        row[xl[a]] = -1
        ef.add_row(row, "==", 0, "aggregate")
    if assignments:
        ef.add_row({lam: 1 for lam in lams}, "==", 1, "convexity")
    else:
        ef.add_row({}, "<=", -1, "empty")
    ef.projection = xl
    k_max = lg.delta - 1
    ef.meta.update(
        delta=lg.delta,
        disjuncts=len(assignments),
        assignments=assignments,
        size_bound=fbar(lg.delta) * lg.node_count ** k_max * (1 + lg.delta * nA),
    )
    return ef


def circulation_ef(D, W, H, f, arcs: Sequence[tuple[int, int]] | None = None,
                   delta_cap: int | None = DEFAULT_DELTA_CAP,
                   cap: int = DEFAULT_ASSIGNMENT_CAP) -> ExtendedFormulation:
    """Extended formulation whose projection onto the y block is S."""
    D = as_matrix(D)
    cs = coset_representatives(H, delta_cap)
    lg = build_layered(D, W, cs, arcs)
    target = cs.classify(tuple(f))
    if cs.delta > 1 and target == 0:
        raise ValueError("f is congruent to 0: no congruency constraint, use the cone directly")
    omega = enumerate_patterns(cs, target) if cs.delta > 1 else []
    inner = assemble_disjunction(lg, omega, cap)
    ef = ExtendedFormulation()
    m = len(lg.arcs)
    y = ef.add_vars("y", m)
    offset = ef.num_vars
    for name, lo in zip(inner.names, inner.lower):
        ef.add_var(name, lo == 0)
    for r in inner.rows:
        ef.add_row([(j + offset, c) for j, c in r.coeffs], r.sense, r.rhs, r.tag)
    xl = [j + offset for j in inner.projection]
    d = cs.delta
    for a in range(m):
        row = {xl[a * d + i]: -1 for i in range(d)}
        row[y[a]] = 1
        ef.add_row(row, "==", 0, "projection")
    ef.projection = y
    ef.meta.update(inner.meta)
    ef.meta.update(layered=lg, omega=omega, target_coset=target)
    return ef
