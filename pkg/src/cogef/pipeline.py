"""Condition checking and end-to-end construction of the x-space formulation.

Three branches, exactly one of which fires on an accepted instance:

* ``pure_cone``   gcd(A) = 1: the slack set is {y >= 0 : R y = 0};
* ``apex``        the apex A^-1 b is integral: P is already integral;
* ``circulation`` otherwise: congruency-constrained circulations over the
                  graph realizing the dual matroid.

Every branch adjoins the linking rows A x + y = b (the apex branch has no
y block) so the formulation projects onto x.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .circulation import DEFAULT_ASSIGNMENT_CAP, circulation_ef, fbar
from .cosets import DEFAULT_DELTA_CAP
from .formulation import ExtendedFormulation
from .hnf import ReformulationError, hermite_decompose, reformulate
from .linalg import Matrix, as_matrix, det_exact, inverse, rank, solve_exact
from .modularity import (
    DEFAULT_ENUM_CAP,
    EnumerationCapExceeded,
    ModularityProfile,
    first_basis,
    split_rows,
    subdeterminant_profile,
)
from .realize import (
    DEFAULT_SEARCH_BUDGET,
    RealizationBudgetExceeded,
    incidence_matrix,
    is_cographic_dual,
    sign_fix,
)

# rows are N A_B with N totally unimodular and Delta >= 2 here, so at most
# n^2 + n + 1 <= n^2 Delta^2 distinct rows
APEX_FACET_CONSTANT = 1


class ConditionError(ValueError):
    """build_ef was called on an instance that is not accepted."""


@dataclass(frozen=True)
class GraphHint:
    nodes: int
    arcs: tuple[tuple[int, int], ...]
    # column_map[a] is the row of A (element of the matroid) carried by arc a
    column_map: tuple[int, ...] | None = None

    def arc_for_rows(self, m: int) -> dict[int, tuple[int, int]]:
        cmap = self.column_map if self.column_map is not None else tuple(range(len(self.arcs)))
        if len(self.arcs) != m or sorted(cmap) != list(range(m)):
            raise ValueError(f"graph hint must carry one arc per row of A ({m})")
        return {row: tuple(arc) for row, arc in zip(cmap, self.arcs)}


@dataclass(frozen=True)
class ProblemInstance:
    A: Matrix
    b: tuple[int, ...]
    graph_hint: GraphHint | None = None
    label: str = ""
    trusted_profile: ModularityProfile | None = None

    def __post_init__(self):
        A = as_matrix(self.A)
        if not A.is_integral():
            raise ValueError("A must be integral")
        object.__setattr__(self, "A", A.to_int())
        object.__setattr__(self, "b", tuple(int(v) for v in self.b))
        if len(self.b) != A.nrows:
            raise ValueError(f"b has length {len(self.b)}, A has {A.nrows} rows")
        if rank(A) != A.ncols:
            raise ValueError(f"A has rank {rank(A)} < {A.ncols} columns")

    @property
    def m(self) -> int:
        return self.A.nrows

    @property
    def n(self) -> int:
        return self.A.ncols


@dataclass
class ConditionReport:
    profile: ModularityProfile | None
    strict: str  # ok | fail | undecided, condition (i)
    cographic: str  # condition (ii)
    span: str  # condition (iii)
    apex: tuple | None
    apex_integral: bool
    verdict: str  # accept | reject | undecided
    failed: tuple[str, ...]
    undecided: tuple[str, ...]
    messages: list[str]
    cache: dict = field(default_factory=dict, repr=False, compare=False)

    def summary(self) -> str:
        head = {"accept": "ACCEPT", "reject": "REJECT", "undecided": "UNDECIDED"}[self.verdict]
        return "\n".join([head] + self.messages)


def _ordered_hint(inst: ProblemInstance, order: Sequence[int]):
    if inst.graph_hint is None:
        return None
    by_row = inst.graph_hint.arc_for_rows(inst.m)
    return inst.graph_hint.nodes, [by_row[i] for i in order]


def check_conditions(inst: ProblemInstance, enum_cap: int = DEFAULT_ENUM_CAP,
                     search_budget: int = DEFAULT_SEARCH_BUDGET) -> ConditionReport:
    A, b = inst.A, inst.b
    m, n = inst.m, inst.n
    msgs: list[str] = []
    cache: dict = {}

    # (i) strict modularity ---------------------------------------------------
    profile = inst.trusted_profile
    capped = None
    if profile is None:
        try:
            profile = subdeterminant_profile(A, enum_cap)
        except EnumerationCapExceeded as exc:
            capped = exc

    # (ii) cographic row matroid -------------------------------------------
    if profile is not None and profile.strictly_modular and profile.witness_basis is not None:
        split = split_rows(A, profile.witness_basis)
    else:
        split = first_basis(A)
    cache["split"] = split
    ii_msgs: list[str] = []
    cographic = _check_cographic(inst, split, search_budget, ii_msgs, cache)

    if capped is not None:
        profile, strict = _strict_from_basis(A, split, cographic, capped, msgs)
    elif profile.strictly_modular:
        strict = "ok"
        msgs.append(f"(i) ok: strictly {profile.delta}-modular" + (" (trusted)" if profile.trusted else ""))
    elif profile.gcd == 1:
        strict = "ok"
        msgs.append(f"(i) ok: gcd(A) = 1 (Delta = {profile.delta}, not strict; pure-cone construction applies)")
    else:
        strict = "fail"
        msgs.append(f"(i) fail: minors take several magnitudes (Delta = {profile.delta}, gcd = {profile.gcd})")
    msgs.extend(ii_msgs)

    # (iii) b in the column span ---------------------------------------------
    apex = solve_exact(A, b)
    if apex is None:
        span = "fail"
        msgs.append("(iii) fail: b is not in the column span of A")
        apex_integral = False
    else:
        span = "ok"
        apex_integral = all(getattr(v, "denominator", 1) == 1 for v in apex)
        msgs.append("(iii) ok: apex " + ("integral" if apex_integral else "fractional"))

    status = {"(i)": strict, "(ii)": cographic, "(iii)": span}
    failed = tuple(k for k, v in status.items() if v == "fail")
    undecided = tuple(k for k, v in status.items() if v == "undecided")
    verdict = "reject" if failed else ("undecided" if undecided else "accept")
    return ConditionReport(profile, strict, cographic, span, apex, apex_integral, verdict,
                           failed, undecided, msgs, cache)


def _strict_from_basis(A, split, cographic, capped, msgs):
    """Decide (i) without enumerating minors.

    Every n x n minor of A equals det(A_B) times a minor of N = A_N A_B^-1,
    so A is strictly Delta-modular exactly when N is totally unimodular, with
    Delta = |det A_B|. A network matrix is totally unimodular, and the signed
    realization behind a positive (ii) certifies that -N is one.
    """
    delta = abs(det_exact(split.A_B))
    N = split.A_N @ inverse(split.A_B)
    bad = next(((i, j) for i, row in enumerate(N.rows) for j, v in enumerate(row) if v not in (0, 1, -1)), None)
    if bad is not None:
        i, j = bad
        swapped = split.nonbasis[i], split.basis[j]
        other = int(delta * abs(N[i, j]))
        if abs(det_exact(hermite_decompose(A).H)) == 1:
            # Delta itself stays unknown; the larger of the two minors seen is a lower bound
            msgs.append(f"(i) ok: gcd(A) = 1 by Hermite form, Delta >= {max(delta, other)} ({capped}); "
                        "pure-cone construction applies")
            return ModularityProfile(max(delta, other), 1, False), "ok"
        msgs.append(f"(i) fail: replacing row {swapped[1]} of basis {list(split.basis)} by row "
                    f"{swapped[0]} turns |det| = {delta} into {other}")
        return None, "fail"
    if cographic == "ok":
        msgs.append(f"(i) ok: strictly {delta}-modular (A_N A_B^-1 is a signed network matrix; {capped})")
        return ModularityProfile(delta, delta, True, tuple(split.basis)), "ok"
    msgs.append(f"(i) undecided: {capped}")
    return None, "undecided"


def _check_cographic(inst, split, budget, msgs, cache) -> str:
    m, n = inst.m, inst.n
    if m == n:
        cache["R"] = Matrix([], m)
        msgs.append("(ii) ok: A is square, the dual matroid is free")
        return "ok"
    ratio = split.A_N @ inverse(split.A_B)
    R = (-ratio).hstack(Matrix.identity(m - n))
    cache["R"] = R
    hint = None
    try:
        hint = _ordered_hint(inst, split.order)
    except ValueError as exc:
        msgs.append(f"note: graph hint ignored ({exc})")
    try:
        ok, reason, real = is_cographic_dual(R, hint, budget)
    except RealizationBudgetExceeded as exc:
        msgs.append(f"(ii) undecided: {exc}")
        return "undecided"
    if not ok:
        msgs.append(f"(ii) fail: M(A^T) is not cographic; {reason}")
        return "fail"
    cache["realization"] = real
    msgs.append(f"(ii) ok: {reason}")
    return "ok"


@dataclass
class EfArtifact:
    formulation: ExtendedFormulation
    branch: str  # apex | pure_cone | circulation
    meta: dict
    target_coset: int | None = None
    label: str = ""


def _size_constant(m: int, n: int, delta: int) -> object:
    """C with every branch's row count <= C n^delta; kappa = m / n."""
    from fractions import Fraction

    kappa = Fraction(m, n)
    return fbar(delta) * kappa ** max(delta - 1, 0) * (1 + delta * delta * kappa) + kappa


def _with_linking(inst: ProblemInstance, inner: ExtendedFormulation, y_of_row: dict[int, int]) -> ExtendedFormulation:
    """x block, then ``inner`` shifted; rows A x + y = b tagged 'link'."""
    ef = ExtendedFormulation()
    xs = ef.add_vars("x", inst.n)
    offset = ef.num_vars
    for name, lo in zip(inner.names, inner.lower):
        ef.add_var(name, lo == 0)
    for r in inner.rows:
        ef.add_row([(j + offset, c) for j, c in r.coeffs], r.sense, r.rhs, r.tag)
    for i in range(inst.m):
        row = {xs[j]: c for j, c in enumerate(inst.A.row(i)) if c}
        row[y_of_row[i] + offset] = 1
        ef.add_row(row, "==", inst.b[i], "link")
    ef.projection = xs
    return ef


def build_ef(inst: ProblemInstance, report: ConditionReport | None = None,
             delta_cap: int | None = DEFAULT_DELTA_CAP,
             assignment_cap: int = DEFAULT_ASSIGNMENT_CAP, **check_kw) -> EfArtifact:
    if report is None:
        report = check_conditions(inst, **check_kw)
    if report.verdict != "accept":
        raise ConditionError(f"instance {inst.label!r} is not accepted:\n{report.summary()}")
    A, b, m, n = inst.A, inst.b, inst.m, inst.n
    profile = report.profile
    delta = profile.delta
    meta: dict = {"m": m, "n": n, "delta": delta, "gcd": profile.gcd}

    if profile.gcd == 1:
        hnf = hermite_decompose(A)
        inner = ExtendedFormulation()
        y = inner.add_vars("y", m, nonneg=True)
        for i in range(hnf.R.nrows):
            inner.add_row({y[j]: c for j, c in enumerate(hnf.R.row(i)) if c}, "==", 0, "cone")
        ef = _with_linking(inst, inner, {i: y[i] for i in range(m)})
        branch, target = "pure_cone", None
        meta.update(disjunction_bound=m, disjunction_rows=inner.num_inequalities, linking_rows=m)
    elif report.apex_integral:
        ef = ExtendedFormulation()
        xs = ef.add_vars("x", n)
        seen = set()
        for i in range(m):
            key = (A.row(i), b[i])
            if key in seen:
                continue
            seen.add(key)
            ef.add_row({xs[j]: c for j, c in enumerate(A.row(i)) if c}, "<=", b[i], "apex")
        ef.projection = xs
        branch, target = "apex", None
        facet_bound = APEX_FACET_CONSTANT * n * n * delta * delta
        if len(ef.rows) > facet_bound:
            raise AssertionError(f"apex branch has {len(ef.rows)} rows > {facet_bound}")
        meta.update(facet_bound=facet_bound, linking_rows=0)
    else:
        split = report.cache["split"]
        try:
            sys = reformulate(A, b, None, split, profile.gcd, check_tu=False)
        except ReformulationError as exc:
            raise ReformulationError(f"circulation branch: {exc}") from exc
        real = report.cache.get("realization")
        R = report.cache["R"]
        if m > n:
            if not R.is_integral():
                raise ReformulationError("circulation branch: [-A_N A_B^-1  I] is not integral")
            S = R.select_cols(range(n)).to_int()
            fix = sign_fix(S, real)
            D = incidence_matrix(real, fix)
        else:
            D = Matrix([[0] * m], m)
        W = Matrix.identity(n).hstack(Matrix.zeros(n, m - n)) if m > n else Matrix.identity(n)
        try:
            inner = circulation_ef(D, W, sys.H, sys.b_ordered[:n], delta_cap=delta_cap, cap=assignment_cap)
        except Exception as exc:
            raise type(exc)(f"circulation branch: {exc}") from exc
        pos = {row: c for c, row in enumerate(sys.order)}
        ef = _with_linking(inst, inner, {i: pos[i] for i in range(m)})
        branch, target = "circulation", sys.target_coset
        lg = inner.meta["layered"]
        meta.update(
            D=D, order=sys.order, H=sys.H, omega=inner.meta["omega"],
            disjuncts=inner.meta["disjuncts"],
            disjunction_bound=inner.meta["size_bound"],
            disjunction_rows=inner.num_inequalities,
            linking_rows=m,
            base_nodes=lg.node_count, layered_arcs=lg.num_arcs,
        )
    C = _size_constant(m, n, delta)
    rows = ef.num_inequalities
    meta.update(size_constant=C, size_rows=rows, size_limit=C * n ** delta)
    if rows > C * n ** delta:
        raise AssertionError(f"{rows} rows exceed C n^Delta = {C * n ** delta}")
    meta["size_note"] = "m is O(n) for cographic row matroids, so C depends on Delta only"
    ef.meta.update(branch=branch)
    return EfArtifact(ef, branch, meta, target, inst.label)


def stab_box_intersect(art: EfArtifact, n: int) -> ExtendedFormulation:
    """Intersect the projected body with the unit box 0 <= x <= 1."""
    ef = art.formulation.copy()
    for j in ef.projection[:n]:
        ef.add_row({j: 1}, ">=", 0, "box")
        ef.add_row({j: 1}, "<=", 1, "box")
    return ef
