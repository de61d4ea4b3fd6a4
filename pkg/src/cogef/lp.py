"""Exact rational simplex for :class:`ExtendedFormulation` systems.

Free variables are first eliminated through equality rows (the Balas and
linking blocks are mostly such definitions), the rest is put in standard
form and solved by a two-phase tableau simplex.  Pricing is Dantzig's rule
with a switch to Bland's rule after a run of degenerate pivots, so the
method cannot cycle.  Arithmetic uses gmpy2's mpq when available and
:class:`fractions.Fraction` otherwise.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .formulation import ExtendedFormulation

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover
    Q = Fraction

_ZERO = Q(0)
_DEGENERATE_STREAK = 30


def _out(v) -> Fraction | int:
    f = Fraction(int(v.numerator), int(v.denominator))
    return f.numerator if f.denominator == 1 else f


@dataclass(frozen=True)
class LpResult:
    status: str  # "optimal" | "unbounded" | "infeasible"
    value: object = None
    point: tuple | None = None
    ray: tuple | None = None

    def project(self, idx: Sequence[int], which: str = "point") -> tuple | None:
        vec = self.point if which == "point" else self.ray
        return None if vec is None else tuple(vec[j] for j in idx)


class _Tableau:
    __slots__ = ("rows", "rhs", "basis")

    def __init__(self, rows, rhs, basis):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis

    def copy(self) -> "_Tableau":
        return _Tableau([dict(r) for r in self.rows], list(self.rhs), list(self.basis))

    def pivot(self, r: int, c: int, d: dict | None = None) -> None:
        row = self.rows[r]
        piv = row[c]
        if piv != 1:
            inv = 1 / piv
            row = {k: v * inv for k, v in row.items()}
            self.rows[r] = row
            self.rhs[r] = self.rhs[r] * inv
        rr = self.rhs[r]
        items = list(row.items())
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            f = other.get(c)
            if f is None:
                continue
            for k, v in items:
                nv = other.get(k, _ZERO) - f * v
                if nv:
                    other[k] = nv
                else:
                    other.pop(k, None)
            if rr:
                self.rhs[i] -= f * rr
        if d is not None:
            f = d.get(c)
            if f is not None:
                for k, v in items:
                    nv = d.get(k, _ZERO) - f * v
                    if nv:
                        d[k] = nv
                    else:
                        d.pop(k, None)
        self.basis[r] = c


def _simplex(tab: _Tableau, d: dict, z, allowed=None):
    """Minimise from a feasible basis.  Returns (status, z, entering column)."""
    streak = 0
    while True:
        neg = [(v, k) for k, v in d.items() if v < 0 and (allowed is None or k in allowed)]
        if not neg:
            return "optimal", z, None
        if streak >= _DEGENERATE_STREAK:
            c = min(k for _, k in neg)
        else:
            c = min(neg)[1]
        best = None
        for i, row in enumerate(tab.rows):
            a = row.get(c)
            if a is not None and a > 0:
                ratio = tab.rhs[i] / a
                key = (ratio, tab.basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return "unbounded", z, c
        ratio, r = best[0][0], best[1]
        z = z + d[c] * ratio
        streak = streak + 1 if ratio == 0 else 0
        tab.pivot(r, c, d)


class LpModel:
    """A formulation prepared for repeated exact optimisation.

    ``homogeneous`` zeroes every right-hand side (the recession cone);
    ``fix`` pins variables to values, with those rows kept inhomogeneous.
    """

    def __init__(self, ef: ExtendedFormulation, homogeneous: bool = False,
                 fix: Mapping[int, object] | None = None):
        self.ef = ef
        self.nvars = ef.num_vars
        rows: dict[int, list] = {}
        rid = 0
        for r in ef.rows:
            coeffs = {j: Q(c) for j, c in r.coeffs}
            rhs = _ZERO if homogeneous else Q(r.rhs)
            if not coeffs:
                if not _holds(_ZERO, r.sense, rhs):
                    self.status = "infeasible"
                    return
                continue
            rows[rid] = [coeffs, r.sense, rhs]
            rid += 1
        for j, v in (fix or {}).items():
            rows[rid] = [{j: Q(1)}, "==", Q(v)]
            rid += 1
        self.free = [j for j in range(self.nvars) if ef.lower[j] is None]
        self.records: list[tuple[int, dict, object, object]] = []
        self._presolve(rows)
        self._standard_form(rows)
        self._phase_one()

    # presolve ---------------------------------------------------------------
    def _presolve(self, rows: dict[int, list]) -> None:
        col_rows: dict[int, set] = {}
        for i, (coeffs, _, _) in rows.items():
            for j in coeffs:
                col_rows.setdefault(j, set()).add(i)

        def cost(v):
            eq = [i for i in col_rows.get(v, ()) if rows[i][1] == "=="]
            if not eq:
                return None
            i = min(eq, key=lambda t: (len(rows[t][0]), t))
            return (len(rows[i][0]) - 1) * (len(col_rows[v]) - 1), i

        heap = []
        for v in self.free:
            c = cost(v)
            if c is not None:
                heap.append((c[0], v))
        heapq.heapify(heap)
        done: set[int] = set()
        while heap:
            key, v = heapq.heappop(heap)
            if v in done:
                continue
            c = cost(v)
            if c is None:
                continue
            if c[0] != key:
                heapq.heappush(heap, (c[0], v))
                continue
            i = c[1]
            coeffs, _, rhs = rows.pop(i)
            for j in coeffs:
                col_rows[j].discard(i)
            a = coeffs[v]
            for s in list(col_rows.get(v, ())):
                sc = rows[s][0]
                f = sc[v] / a
                for j, cj in coeffs.items():
                    nv = sc.get(j, _ZERO) - f * cj
                    if nv:
                        if j not in sc:
                            col_rows.setdefault(j, set()).add(s)
                        sc[j] = nv
                    elif j in sc:
                        del sc[j]
                        col_rows[j].discard(s)
                rows[s][2] = rows[s][2] - f * rhs
                if not sc:
                    if not _holds(_ZERO, rows[s][1], rows[s][2]):
                        self.status = "infeasible"
                        self._infeasible_early = True
                    del rows[s]
            self.records.append((v, coeffs, rhs, a))
            done.add(v)
            for j in coeffs:
                if j != v and j in self.free and j not in done:
                    cj = cost(j)
                    if cj is not None:
                        heapq.heappush(heap, (cj[0], j))
        self.eliminated = done
        self.col_rows = col_rows

    # standard form ---------------------------------------------------------
    def _standard_form(self, rows: dict[int, list]) -> None:
        if getattr(self, "_infeasible_early", False):
            return
        # structural columns
        self.colmap: list[tuple[int, int]] = []  # column -> (variable, sign)
        var_cols: dict[int, list[tuple[int, int]]] = {}
        self.unused_free: list[int] = []
        for j in range(self.nvars):
            if j in self.eliminated:
                continue
            used = bool(self.col_rows.get(j))
            if self.ef.lower[j] is None:
                if not used:
                    self.unused_free.append(j)
                    continue
                var_cols[j] = [(len(self.colmap), 1)]
                self.colmap.append((j, 1))
                var_cols[j].append((len(self.colmap), -1))
                self.colmap.append((j, -1))
            else:
                var_cols[j] = [(len(self.colmap), 1)]
                self.colmap.append((j, 1))
        self.var_cols = var_cols
        nstruct = len(self.colmap)
        trows, rhs, basis = [], [], []
        art_start = None
        pending_art = []
        ncol = nstruct
        for coeffs, sense, b in rows.values():
            row: dict[int, object] = {}
            for j, c in coeffs.items():
                for col, sgn in var_cols[j]:
                    row[col] = c if sgn == 1 else -c
            slack = None
            if sense != "==":
                slack = ncol
                row[slack] = Q(1) if sense == "<=" else Q(-1)
                ncol += 1
            if b < 0:
                row = {k: -v for k, v in row.items()}
                b = -b
            if slack is not None and row[slack] == 1:
                basis.append(slack)
            else:
                basis.append(None)
                pending_art.append(len(trows))
            trows.append(row)
            rhs.append(b)
        art_start = ncol
        for i in pending_art:
            trows[i][ncol] = Q(1)
            basis[i] = ncol
            ncol += 1
        self.nstruct = nstruct
        self.art_start = art_start
        self.ncols = ncol
        self.tab = _Tableau(trows, rhs, basis)

    def _phase_one(self) -> None:
        if getattr(self, "_infeasible_early", False):
            self.status = "infeasible"
            return
        tab = self.tab
        art = self.art_start
        d: dict = {}
        z = _ZERO
        for i, row in enumerate(tab.rows):
            if tab.basis[i] >= art:
                z += tab.rhs[i]
                for k, v in row.items():
                    if k < art:
                        d[k] = d.get(k, _ZERO) - v
        d = {k: v for k, v in d.items() if v}
        status, z, _ = _simplex(tab, d, z)
        if z > 0:
            self.status = "infeasible"
            return
        # drive artificials out, drop redundant rows
        keep = []
        for i in range(len(tab.rows)):
            if tab.basis[i] >= art:
                col = next((k for k in sorted(tab.rows[i]) if k < art), None)
                if col is None:
                    continue
                tab.pivot(i, col)
            keep.append(i)
        tab.rows = [{k: v for k, v in tab.rows[i].items() if k < art} for i in keep]
        tab.rhs = [tab.rhs[i] for i in keep]
        tab.basis = [tab.basis[i] for i in keep]
        self.status = "feasible"

    # optimisation ------------------------------------------------------------
    def optimize(self, objective: Mapping[int, object], sense: str = "min") -> LpResult:
        if self.status == "infeasible":
            return LpResult("infeasible")
        sign = 1 if sense == "min" else -1
        obj = {j: Q(c) * sign for j, c in objective.items() if c}
        const = _ZERO
        for v, coeffs, rhs, a in self.records:
            c = obj.pop(v, None)
            if c is None:
                continue
            f = c / a
            const += f * rhs
            for j, cj in coeffs.items():
                if j != v:
                    nv = obj.get(j, _ZERO) - f * cj
                    if nv:
                        obj[j] = nv
                    else:
                        obj.pop(j, None)
        for j in self.unused_free:
            if obj.get(j):
                step = Q(-1) if obj[j] > 0 else Q(1)
                ray = self._recover({}, homogeneous=True, extra={j: step})
                return LpResult("unbounded", ray=ray)
        tab = self.tab.copy()
        cost = {}
        for j, c in obj.items():
            for col, sgn in self.var_cols[j]:
                cost[col] = c if sgn == 1 else -c
        d = dict(cost)
        z = const
        for i, row in enumerate(tab.rows):
            cb = cost.get(tab.basis[i])
            if cb:
                z += cb * tab.rhs[i]
                for k, v in row.items():
                    nv = d.get(k, _ZERO) - cb * v
                    if nv:
                        d[k] = nv
                    else:
                        d.pop(k, None)
        for b in tab.basis:
            d.pop(b, None)
        status, z, entering = _simplex(tab, d, z)
        self.tab = tab  # warm start for the next objective
        if status == "unbounded":
            col_vals = {entering: Q(1)}
            for i, row in enumerate(tab.rows):
                a = row.get(entering)
                if a:
                    col_vals[tab.basis[i]] = -a
            return LpResult("unbounded", ray=self._recover(col_vals, homogeneous=True))
        col_vals = {tab.basis[i]: tab.rhs[i] for i in range(len(tab.rows)) if tab.rhs[i]}
        point = self._recover(col_vals, homogeneous=False)
        return LpResult("optimal", value=_out(z * sign), point=point)

    def feasible_point(self) -> LpResult:
        if self.status == "infeasible":
            return LpResult("infeasible")
        return self.optimize({}, "min")

    def _recover(self, col_vals: dict, homogeneous: bool, extra: dict | None = None) -> tuple:
        vals = [_ZERO] * self.nvars
        for col, v in col_vals.items():
            if col < self.nstruct:
                j, sgn = self.colmap[col]
                vals[j] += v if sgn == 1 else -v
        for j, v in (extra or {}).items():
            vals[j] = v
        for v, coeffs, rhs, a in reversed(self.records):
            s = _ZERO if homogeneous else rhs
            for j, cj in coeffs.items():
                if j != v:
                    s -= cj * vals[j]
            vals[v] = s / a
        return tuple(_out(x) for x in vals)


def _holds(lhs, sense: str, rhs) -> bool:
    if sense == "<=":
        return lhs <= rhs
    if sense == ">=":
        return lhs >= rhs
    return lhs == rhs


def lp_exact(ef: ExtendedFormulation, objective: Sequence, sense: str = "min") -> LpResult:
    """Optimise ``objective`` (one coefficient per projected variable)."""
    if len(objective) != len(ef.projection):
        raise ValueError("objective length does not match the projected block")
    obj = {j: c for j, c in zip(ef.projection, objective)}
    return LpModel(ef).optimize(obj, sense)


def is_member(ef: ExtendedFormulation, x: Sequence) -> bool:
    """Whether x lies in the projection of ``ef`` (exact feasibility LP)."""
    fix = {j: v for j, v in zip(ef.projection, x)}
    return LpModel(ef, fix=fix).status == "feasible"
