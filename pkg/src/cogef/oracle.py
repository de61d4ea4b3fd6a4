"""Brute-force certification of built formulations.

Integer points come from filtering a box around the apex (numba kernel when
available).  The formulation side is always solved with the exact simplex,
so the two routes share nothing but the instance data.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import floor, prod
from typing import Sequence

import numpy as np

from . import _kernels
from .formulation import ExtendedFormulation
from .linalg import Matrix, as_matrix, nullspace, primitive, rank, solve_exact
from .lp import LpModel

DEFAULT_RADIUS = 6
DEFAULT_LATTICE_CAP = 10_000_000
DIRECT_MEMBERSHIP_LIMIT = 400


class LatticeCapExceeded(RuntimeError):
    pass


@dataclass
class VerificationReport:
    label: str
    objectives_tested: int = 0
    matches: int = 0
    mismatches: list = field(default_factory=list)
    membership_failures: list = field(default_factory=list)
    ray_failures: list = field(default_factory=list)
    points_checked: int = 0
    flags: list = field(default_factory=list)

    @property
    def verdict(self) -> str:
        if self.mismatches or self.membership_failures or self.ray_failures:
            return "fail"
        if self.objectives_tested == 0:
            return "inconclusive"
        return "pass"

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        def enc(v):
            if isinstance(v, Fraction):
                return str(v)
            if isinstance(v, (list, tuple)):
                return [enc(x) for x in v]
            return v

        return {
            "label": self.label,
            "verdict": self.verdict,
            "objectives_tested": self.objectives_tested,
            "matches": self.matches,
            "mismatches": enc(self.mismatches),
            "membership_failures": enc(self.membership_failures),
            "ray_failures": enc(self.ray_failures),
            "points_checked": self.points_checked,
            "flags": list(self.flags),
        }


# lattice points -----------------------------------------------------------------

def _box_points(A: Matrix, b: Sequence[int], lo: list[int], hi: list[int], cap: int,
                use_numba: bool | None = None) -> np.ndarray:
    n = A.ncols
    count = prod(h - l + 1 for l, h in zip(lo, hi))
    if n * count > cap:
        raise LatticeCapExceeded(f"box of {count} points in dimension {n} exceeds the cap {cap}")
    An = np.array(A.rows, dtype=np.int64).reshape(A.nrows, n)
    bn = np.array(b, dtype=np.int64)
    lo_a, hi_a = np.array(lo, dtype=np.int64), np.array(hi, dtype=np.int64)
    if _kernels.box_filter_safe(An, bn, lo_a, hi_a):
        return _kernels.box_filter(An, bn, lo_a, hi_a, use_numba)
    from itertools import product

    keep = [p for p in product(*(range(l, h + 1) for l, h in zip(lo, hi)))
            if all(sum(a * x for a, x in zip(row, p)) <= bi for row, bi in zip(A.rows, b))]
    return np.array(keep, dtype=object).reshape(len(keep), n)


def enumerate_lattice_points(inst, radius: int = DEFAULT_RADIUS, cap: int = DEFAULT_LATTICE_CAP,
                             use_numba: bool | None = None) -> list[tuple[int, ...]]:
    """Integer x with |x - floor(apex)|_inf <= radius and A x <= b, lexicographically.

    Every integer point within ``radius`` of the apex itself is in the box.
    """
    apex = solve_exact(inst.A, inst.b)
    if apex is None:
        raise ValueError("b is not in the column span of A; the apex is undefined")
    centre = [floor(Fraction(v)) for v in apex]
    lo = [c - radius for c in centre]
    hi = [c + radius for c in centre]
    pts = _box_points(inst.A, inst.b, lo, hi, cap, use_numba)
    return [tuple(int(v) for v in p) for p in pts]


def recession_generators(A) -> list[tuple[int, ...]]:
    """Primitive integer extreme rays of the pointed cone {d : A d <= 0}."""
    A = as_matrix(A)
    m, n = A.shape
    out: list[tuple[int, ...]] = []
    seen = set()
    for rows in combinations(range(m), n - 1):
        sub = A.select_rows(rows) if rows else Matrix([], n)
        if rank(sub) != n - 1:
            continue
        (d,) = nullspace(sub)
        d = primitive(d)
        for cand in (d, tuple(-v for v in d)):
            if cand not in seen and all(v <= 0 for v in A @ cand):
                seen.add(cand)
                out.append(cand)
    return sorted(out)


# checks --------------------------------------------------------------------------

def _fix(ef: ExtendedFormulation, x: Sequence) -> dict:
    return {j: v for j, v in zip(ef.projection, x)}


def _objective(ef: ExtendedFormulation, c: Sequence) -> dict:
    return {j: v for j, v in zip(ef.projection, c) if v}


def check_recession(ef: ExtendedFormulation, cone_rows, generators: Sequence[Sequence[int]]) -> list:
    """Both inclusions between the recession cone of the projection and {d : C d <= 0}.

    Each generator must lift into the homogenized system, and every cone row
    must stay bounded (maximum 0) over the homogenized projection.
    """
    failures = []
    for g in generators:
        if LpModel(ef, homogeneous=True, fix=_fix(ef, g)).status != "feasible":
            failures.append(("generator not a recession direction", tuple(g)))
    model = LpModel(ef, homogeneous=True)
    for i, row in enumerate(as_matrix(cone_rows).rows):
        res = model.optimize(_objective(ef, row), "max")
        if res.status != "optimal" or res.value != 0:
            failures.append(("projection recedes past cone row", i))
    return failures


def is_lifted(ef: ExtendedFormulation, x: Sequence) -> bool:
    return LpModel(ef, fix=_fix(ef, x)).status == "feasible"


def _reduce_points(pts: np.ndarray, A: np.ndarray, b: np.ndarray, gens: list) -> np.ndarray:
    """Subtract generators while staying in P; returns the distinct minimal points."""
    pts = pts.copy()
    G = [np.array(g, dtype=np.int64) for g in gens]
    moved = True
    while moved:
        moved = False
        for g in G:
            while True:
                cand = pts - g
                ok = np.all(cand @ A.T <= b, axis=1)
                if not ok.any():
                    break
                pts[ok] = cand[ok]
                moved = True
    return np.unique(pts, axis=0)


def bounded_objectives(A, count: int, seed: int, max_weight: int = 3) -> list[tuple]:
    """Objectives c = -A^T u (u >= 0 random), each confirmed by an exact dual solve."""
    A = as_matrix(A)
    m, n = A.shape
    rng = random.Random(seed)
    out = []
    attempts = 0
    while len(out) < count and attempts < 50 * count + 50:
        attempts += 1
        u = [rng.randint(0, max_weight) for _ in range(m)]
        if not any(u):
            continue
        c = tuple(-v for v in A.T @ tuple(u))
        if not any(c) or not in_dual_cone(A, c):
            continue
        out.append(c)
    return out


def in_dual_cone(A, c: Sequence) -> bool:
    """Exact test that -c lies in the cone spanned by the rows of A."""
    A = as_matrix(A)
    ef = ExtendedFormulation()
    u = ef.add_vars("u", A.nrows, nonneg=True)
    for j in range(A.ncols):
        ef.add_row({u[i]: A[i, j] for i in range(A.nrows) if A[i, j]}, "==", -c[j])
    return LpModel(ef).status == "feasible"


def verify_hull(art, inst, radius: int = DEFAULT_RADIUS, num_objectives: int = 20, seed: int = 0,
                lattice_cap: int = DEFAULT_LATTICE_CAP,
                direct_limit: int = DIRECT_MEMBERSHIP_LIMIT) -> VerificationReport:
    ef = art.formulation if hasattr(art, "formulation") else art
    rep = VerificationReport(getattr(inst, "label", ""))
    A, b, n = inst.A, inst.b, inst.n
    pts = enumerate_lattice_points(inst, radius, lattice_cap)
    rep.points_checked = len(pts)
    gens = recession_generators(A)
    apex = solve_exact(A, b)
    reach = n * max((max(abs(v) for v in g) for g in gens), default=0)
    certified = reach <= radius
    rep.flags.append("radius certified" if certified else
                     f"radius not certified (minimal points may reach {reach})")
    if not pts:
        rep.flags.append("no lattice points within the radius")
        if certified:
            # every lattice point of P lies within reach of the apex: the hull is empty
            model = LpModel(ef)
            for c in bounded_objectives(A, num_objectives, seed):
                rep.objectives_tested += 1
                res = model.optimize(_objective(ef, c), "min")
                if res.status == "infeasible":
                    rep.matches += 1
                else:
                    rep.mismatches.append((c, res.status, "infeasible"))
        return rep
    rep.ray_failures.extend(check_recession(ef, A, gens))

    # membership
    if len(pts) <= direct_limit:
        to_check = pts
    else:
        An = np.array(A.rows, dtype=np.int64)
        minimal = _reduce_points(np.array(pts, dtype=np.int64), An, np.array(b, dtype=np.int64), gens)
        to_check = [tuple(int(v) for v in p) for p in minimal]
        rep.flags.append(f"membership via {len(to_check)} minimal points plus recession generators")
    for p in to_check:
        if not is_lifted(ef, p):
            rep.membership_failures.append(p)

    # optimisation
    model = LpModel(ef)
    P = np.array(pts, dtype=object)
    near = 0
    for c in bounded_objectives(A, num_objectives, seed):
        rep.objectives_tested += 1
        vals = P.dot(np.array(c, dtype=object))
        best = min(vals)
        res = model.optimize(_objective(ef, c), "min")
        if res.status == "optimal" and res.value == best:
            rep.matches += 1
        else:
            rep.mismatches.append((c, res.value if res.status == "optimal" else res.status, best))
        arg = pts[int(np.argmin(vals))]
        if any(abs(Fraction(x) - Fraction(a)) >= radius - 1 for x, a in zip(arg, apex)):
            near += 1
    if near:
        rep.flags.append(f"{near} of {rep.objectives_tested} oracle optima lie near the radius boundary")
    return rep


def verify_size_bound(art) -> bool:
    """Row count against the disjunctive bound (plus linking) or the apex facet bound."""
    ef, meta = art.formulation, art.meta
    rows = ef.num_inequalities
    if art.branch == "apex":
        bound = meta["facet_bound"]
        actual = len(ef.rows)
    else:
        bound = meta["disjunction_bound"] + meta["linking_rows"]
        actual = rows
    meta["size_check"] = {"actual": actual, "bound": bound}
    return actual <= bound


# stable sets -------------------------------------------------------------------

def stable_sets(edges: Sequence[tuple[int, int]], k: int) -> list[tuple[int, ...]]:
    out = []
    for mask in range(1 << k):
        if all(not (mask >> u & 1 and mask >> v & 1) for u, v in edges):
            out.append(tuple(mask >> i & 1 for i in range(k)))
    return out


def verify_stab(ef: ExtendedFormulation, inst, num_objectives: int = 50, seed: int = 0,
                weight_range: tuple[int, int] = (-3, 10)) -> VerificationReport:
    """Maximum over the box-intersected formulation against all stable sets."""
    k = inst.n
    edges = [tuple(j for j, v in enumerate(row) if v) for row in inst.A.rows]
    sets = stable_sets(edges, k)
    rep = VerificationReport(getattr(inst, "label", ""), points_checked=len(sets))
    for s in sets:
        if not is_lifted(ef, s):
            rep.membership_failures.append(s)
    rng = random.Random(seed)
    objectives = [(1,) * k] + [tuple(rng.randint(*weight_range) for _ in range(k))
                               for _ in range(num_objectives - 1)]
    model = LpModel(ef)
    for c in objectives:
        rep.objectives_tested += 1
        best = max(sum(a * x for a, x in zip(c, s)) for s in sets)
        res = model.optimize(_objective(ef, c), "max")
        if res.status == "optimal" and res.value == best:
            rep.matches += 1
        else:
            rep.mismatches.append((c, res.value if res.status == "optimal" else res.status, best))
    return rep


# circulations ----------------------------------------------------------------------

def enumerate_circulations(D, bound: int, use_numba: bool | None = None) -> list[tuple[int, ...]]:
    """y in {0..bound}^A with D y = 0."""
    D = as_matrix(D).to_int()
    m = D.ncols
    A = D.vstack(-D)
    b = [0] * A.nrows
    if A.nrows == 0:
        A, b = Matrix([[0] * m], m), [0]
    pts = _box_points(A, b, [0] * m, [bound] * m, DEFAULT_LATTICE_CAP * 10, use_numba)
    return [tuple(int(v) for v in p) for p in pts]


def circulation_cone(D) -> Matrix:
    """Rows C with {y : C y <= 0} = {y >= 0 : D y = 0}."""
    D = as_matrix(D).to_int()
    m = D.ncols
    return D.vstack(-D).vstack(-Matrix.identity(m))


def verify_circulation(ef: ExtendedFormulation, D, W, H, f, bound: int = 6, num_objectives: int = 25,
                       seed: int = 0, check_rays: bool = True) -> VerificationReport:
    """Projected optima against brute force over circulations with entries <= bound."""
    from .cosets import coset_representatives

    cs = coset_representatives(H, None)
    W = as_matrix(W).to_int()
    target = cs.classify(tuple(f))
    pts = [y for y in enumerate_circulations(D, bound) if cs.classify(W @ y) == target]
    rep = VerificationReport("circulation", points_checked=len(pts))
    cone = circulation_cone(D)
    if check_rays:
        rep.ray_failures.extend(check_recession(ef, cone, recession_generators(cone)))
    for y in pts:
        if not is_lifted(ef, y):
            rep.membership_failures.append(y)
    if not pts:
        rep.flags.append("no congruent circulation within the bound")
        return rep
    m = as_matrix(D).ncols
    rng = random.Random(seed)
    model = LpModel(ef)
    cone_ef = ExtendedFormulation()
    yv = cone_ef.add_vars("y", m, nonneg=True)
    for row in as_matrix(D).rows:
        cone_ef.add_row({yv[j]: v for j, v in enumerate(row) if v}, "==", 0)
    cone_ef.projection = yv
    cone_model = LpModel(cone_ef)
    P = np.array(pts, dtype=object)
    attempts = 0
    while rep.objectives_tested < num_objectives and attempts < 100 * num_objectives:
        attempts += 1
        c = tuple(rng.randint(-2, 6) for _ in range(m))
        if cone_model.optimize(_objective(cone_ef, c), "min").status != "optimal":
            continue
        rep.objectives_tested += 1
        best = min(P.dot(np.array(c, dtype=object)))
        res = model.optimize(_objective(ef, c), "min")
        if res.status == "optimal" and res.value == best:
            rep.matches += 1
        else:
            rep.mismatches.append((c, res.value if res.status == "optimal" else res.status, best))
    return rep


# corruption for negative controls ------------------------------------------------

def drop_disjunct(ef: ExtendedFormulation, d: int) -> ExtendedFormulation:
    """Remove every row and variable of one disjunct."""
    prefixes = (f"lam[{d}]", f"xt[{d}][", f"xs[{d},")
    drop_vars = [j for j, name in enumerate(ef.names) if name.startswith(prefixes)]
    tag = f"disjunct:{d}"
    out = ef.without_rows([i for i, r in enumerate(ef.rows) if r.tag == tag])
    out = out.without_vars(drop_vars)
    return out


def drop_row(ef: ExtendedFormulation, tag: str, which: int = 0) -> ExtendedFormulation:
    rows = ef.rows_tagged(tag)
    return ef.without_rows([rows[which]])
