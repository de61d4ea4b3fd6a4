"""Explicit linear systems over original plus auxiliary variables."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

SENSES = ("<=", ">=", "==")


@dataclass(frozen=True)
class Row:
    coeffs: tuple[tuple[int, object], ...]  # (variable index, exact coefficient), sorted, no zeros
    sense: str
    rhs: object
    tag: str = ""

    @classmethod
    def make(cls, coeffs, sense: str, rhs, tag: str = "") -> "Row":
        if sense not in SENSES:
            raise ValueError(f"unknown sense {sense!r}")
        acc: dict[int, Fraction] = {}
        items = coeffs.items() if isinstance(coeffs, dict) else coeffs
        for j, c in items:
            acc[j] = acc.get(j, 0) + c
        clean = tuple(sorted((j, _tidy(c)) for j, c in acc.items() if c != 0))
        return cls(clean, sense, _tidy(rhs), tag)


def _tidy(v):
    v = Fraction(v)
    return v.numerator if v.denominator == 1 else v


@dataclass
class ExtendedFormulation:
    """A polyhedron {z : rows} whose projection onto ``projection`` is the target.

    ``lower[j]`` is 0 for sign-constrained variables and None for free ones;
    sign constraints count as inequalities when sizing the formulation.
    """

    names: list[str] = field(default_factory=list)
    lower: list = field(default_factory=list)
    rows: list[Row] = field(default_factory=list)
    projection: list[int] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    # building -------------------------------------------------------------
    def add_var(self, name: str, nonneg: bool = False) -> int:
        self.names.append(name)
        self.lower.append(0 if nonneg else None)
        return len(self.names) - 1

    def add_vars(self, prefix: str, count: int, nonneg: bool = False) -> list[int]:
        return [self.add_var(f"{prefix}[{i}]", nonneg) for i in range(count)]

    def add_row(self, coeffs, sense: str, rhs, tag: str = "") -> None:
        self.rows.append(Row.make(coeffs, sense, rhs, tag))

    # inspection -----------------------------------------------------------
    @property
    def num_vars(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)

    @property
    def num_equations(self) -> int:
        return sum(1 for r in self.rows if r.sense == "==")

    @property
    def num_inequalities(self) -> int:
        explicit = sum(1 for r in self.rows if r.sense != "==")
        return explicit + sum(1 for lo in self.lower if lo is not None)

    def rows_tagged(self, prefix: str) -> list[int]:
        return [i for i, r in enumerate(self.rows) if r.tag.startswith(prefix)]

    def tags(self) -> list[str]:
        seen: dict[str, None] = {}
        for r in self.rows:
            seen.setdefault(r.tag, None)
        return list(seen)

    def copy(self) -> "ExtendedFormulation":
        return ExtendedFormulation(list(self.names), list(self.lower), list(self.rows),
                                   list(self.projection), dict(self.meta))

    # editing used by negative controls and box intersection ------------------
    def without_rows(self, indices: Iterable[int]) -> "ExtendedFormulation":
        drop = set(indices)
        out = self.copy()
        out.rows = [r for i, r in enumerate(self.rows) if i not in drop]
        return out

    def without_vars(self, indices: Iterable[int]) -> "ExtendedFormulation":
        """Delete variables, erasing their terms everywhere."""
        drop = set(indices)
        if drop & set(self.projection):
            raise ValueError("cannot delete projected variables")
        keep = [j for j in range(self.num_vars) if j not in drop]
        remap = {j: k for k, j in enumerate(keep)}
        out = ExtendedFormulation(
            [self.names[j] for j in keep],
            [self.lower[j] for j in keep],
            [],
            [remap[j] for j in self.projection],
            dict(self.meta),
        )
        for r in self.rows:
            coeffs = [(remap[j], c) for j, c in r.coeffs if j in remap]
            if not coeffs and r.rhs == 0:
                continue
            out.rows.append(Row.make(coeffs, r.sense, r.rhs, r.tag))
        return out

    def evaluate(self, point: Sequence) -> bool:
        """Exact feasibility of a full point."""
        for j, lo in enumerate(self.lower):
            if lo is not None and point[j] < lo:
                return False
        for r in self.rows:
            lhs = sum(c * point[j] for j, c in r.coeffs)
            if r.sense == "<=" and lhs > r.rhs:
                return False
            if r.sense == ">=" and lhs < r.rhs:
                return False
            if r.sense == "==" and lhs != r.rhs:
                return False
        return True
