"""Coset systems of Z^d / H Z^d and the zero-sum-free pattern set Omega."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import floor
from typing import Sequence

from .linalg import Matrix, as_matrix, det_exact, inverse

DEFAULT_DELTA_CAP = 6


class DeltaCapExceeded(ValueError):
    pass


@dataclass(frozen=True)
class CosetSystem:
    """Representatives g^0 = 0, g^1, ... of Z^d / H Z^d inside H [0, 1)^d."""

    H: Matrix
    delta: int
    reps: tuple[tuple[int, ...], ...]
    add_table: tuple[tuple[int, ...], ...]
    _Hinv: Matrix = field(repr=False, compare=False)
    _index: dict = field(repr=False, compare=False)

    def reduce(self, v: Sequence[int]) -> tuple[int, ...]:
        """The parallelepiped representative congruent to v."""
        coords = self._Hinv @ tuple(v)
        shift = tuple(floor(Fraction(c)) for c in coords)
        return tuple(int(a - b) for a, b in zip(v, self.H @ shift))

    def classify(self, v: Sequence[int]) -> int:
        return self._index[self.reduce(v)]

    def add(self, i: int, j: int) -> int:
        return self.add_table[i][j]

    def neg(self, i: int) -> int:
        return self.add_table[i].index(0)

    def total(self, seq: Sequence[int]) -> int:
        s = 0
        for t in seq:
            s = self.add_table[s][t]
        return s


def coset_representatives(H, delta_cap: int | None = DEFAULT_DELTA_CAP) -> CosetSystem:
    from .hnf import hermite_decompose

    H = as_matrix(H).to_int()
    d = H.nrows
    if H.ncols != d:
        raise ValueError("H must be square")
    delta = abs(det_exact(H))
    if delta == 0:
        raise ValueError("H is singular")
    if delta_cap is not None and delta > delta_cap:
        raise DeltaCapExceeded(f"|det H| = {delta} exceeds the cap {delta_cap}")
    Hinv = inverse(H)
    # H Z^d = L Z^d for the lower-triangular L = (HNF of H^T)^T, whose diagonal
    # box is a complete residue system.
    L = hermite_decompose(H.T).H.T
    diag = [L[i, i] for i in range(d)]
    index: dict[tuple[int, ...], int] = {}
    tmp = CosetSystem(H, delta, (), (), Hinv, index)
    reps = sorted({tmp.reduce(p) for p in product(*(range(k) for k in diag))})
    zero = tuple([0] * d)
    reps.remove(zero)
    reps = [zero] + reps
    if len(reps) != delta:
        raise AssertionError("coset enumeration is inconsistent with |det H|")
    for i, r in enumerate(reps):
        index[r] = i
    table = tuple(
        tuple(index[tmp.reduce(tuple(a + b for a, b in zip(ri, rj)))] for rj in reps)
        for ri in reps
    )
    return CosetSystem(H, delta, tuple(reps), table, Hinv, index)


def enumerate_patterns(cs: CosetSystem, f: Sequence[int] | int, cap: int = 100_000) -> list[tuple[int, ...]]:
    """Omega: sequences of nonzero coset indices summing to the class of f
    with no nonempty zero-sum subsequence.

    ``f`` is either an integer vector or a coset index.  Ordered by length,
    then lexicographically.
    """
    target = f if isinstance(f, int) else cs.classify(f)
    delta = cs.delta
    out: list[tuple[int, ...]] = []

    def extend(seq: tuple[int, ...], sums: frozenset, total: int):
        if seq and total == target:
            out.append(seq)
            if len(out) > cap:
                raise RuntimeError(f"more than {cap} patterns")
        if len(seq) == delta - 1:
            return
        for t in range(1, delta):
            new = {t} | {cs.add_table[s][t] for s in sums}
            if 0 in new:
                continue
            extend(seq + (t,), sums | frozenset(new), cs.add_table[total][t])

    extend((), frozenset(), 0)
    out.sort(key=lambda s: (len(s), s))
    return out
