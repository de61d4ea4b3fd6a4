"""Subdeterminant profile of a full-column-rank integer matrix.

Delta(A), gcd(A) and strictness are obtained by brute-force enumeration of
all n x n row-submatrices, capped so the caller can fall back to a trusted
profile on larger inputs.  Total unimodularity is tested the same way.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, islice
from math import comb, gcd

import numpy as np

from . import _kernels
from .linalg import Matrix, as_matrix, bareiss_det, rank

DEFAULT_ENUM_CAP = 2_000_000
DEFAULT_TU_CAP = 1_000_000
_CHUNK = 50_000


class EnumerationCapExceeded(RuntimeError):
    """The brute-force enumeration would exceed the configured cap."""


@dataclass(frozen=True)
class ModularityProfile:
    delta: int
    gcd: int
    strictly_modular: bool
    witness_basis: tuple[int, ...] | None = None
    trusted: bool = False

    def __post_init__(self):
        if self.strictly_modular and self.delta and self.gcd != self.delta:
            raise ValueError("a strictly modular profile needs gcd == delta")


@dataclass(frozen=True)
class BasisSplit:
    basis: tuple[int, ...]
    nonbasis: tuple[int, ...]
    A_B: Matrix
    A_N: Matrix

    @property
    def order(self) -> tuple[int, ...]:
        """Row permutation that puts the basis rows first."""
        return self.basis + self.nonbasis


def _iter_dets(rows: list[list[int]], combos, k: int):
    """Yield (combo, det) for the k x k row-submatrices picked by ``combos``."""
    use_fast = _kernels.int64_safe(rows, k)
    arr = np.array(rows, dtype=np.int64) if use_fast else None
    it = iter(combos)
    while True:
        block = list(islice(it, _CHUNK))
        if not block:
            return
        if use_fast:
            idx = np.array(block, dtype=np.int64)
            dets = _kernels.batch_det(arr[idx])
            yield from zip(block, (int(d) for d in dets))
        else:
            for c in block:
                yield c, bareiss_det([rows[i] for i in c])


def subdeterminant_profile(A, enum_cap: int = DEFAULT_ENUM_CAP) -> ModularityProfile:
    A = as_matrix(A).to_int()
    m, n = A.shape
    if rank(A) != n:
        raise ValueError(f"A must have full column rank {n}")
    total = comb(m, n)
    if total > enum_cap:
        raise EnumerationCapExceeded(f"{total} minors of size {n} exceed the cap {enum_cap}")
    rows = [list(r) for r in A.rows]
    delta = 0
    g = 0
    witness = None
    values: set[int] = set()
    for c, d in _iter_dets(rows, combinations(range(m), n), n):
        d = abs(d)
        if d == 0:
            continue
        values.add(d)
        g = gcd(g, d)
        if d > delta:
            delta = d
            witness = c
    strict = len(values) == 1
    return ModularityProfile(delta=delta, gcd=g, strictly_modular=strict, witness_basis=witness)


def find_basis(A, profile: ModularityProfile) -> BasisSplit:
    """Lexicographically smallest row set B with |det A_B| = profile.delta."""
    A = as_matrix(A).to_int()
    m, n = A.shape
    if not profile.strictly_modular:
        raise ValueError("find_basis expects a strictly modular profile")
    rows = [list(r) for r in A.rows]
    for c, d in _iter_dets(rows, combinations(range(m), n), n):
        if abs(d) == profile.delta:
            return split_rows(A, c)
    raise RuntimeError(f"no basis with |det| = {profile.delta}; profile is inconsistent with A")


def first_basis(A) -> BasisSplit:
    """Greedy basis: the first linearly independent rows, top to bottom."""
    A = as_matrix(A)
    chosen: list[int] = []
    for i in range(A.nrows):
        if rank(A.select_rows(chosen + [i])) == len(chosen) + 1:
            chosen.append(i)
            if len(chosen) == A.ncols:
                break
    if len(chosen) != A.ncols:
        raise ValueError("A does not have full column rank")
    return split_rows(A, tuple(chosen))


def split_rows(A, basis) -> BasisSplit:
    A = as_matrix(A)
    basis = tuple(basis)
    nonbasis = tuple(i for i in range(A.nrows) if i not in basis)
    return BasisSplit(basis, nonbasis, A.select_rows(basis), A.select_rows(nonbasis))


def is_totally_unimodular(M, cap: int = DEFAULT_TU_CAP) -> bool:
    """Every square subdeterminant lies in {0, 1, -1}; brute force."""
    M = as_matrix(M)
    if not M.is_integral():
        return False
    M = M.to_int()
    m, n = M.shape
    if any(v not in (-1, 0, 1) for r in M.rows for v in r):
        return False
    total = sum(comb(m, k) * comb(n, k) for k in range(2, min(m, n) + 1))
    if total > cap:
        raise EnumerationCapExceeded(f"{total} square submatrices exceed the cap {cap}")
    arr = np.array(M.rows, dtype=np.int64).reshape(m, n)
    # sizes are checked in increasing order, so when size k is reached every
    # smaller minor is in {0, +-1}; Bareiss intermediates are such minors and
    # int64 cannot overflow.
    for k in range(2, min(m, n) + 1):
        col_sets = np.array(list(combinations(range(n), k)), dtype=np.int64)
        for rc in combinations(range(m), k):
            sub = arr[np.array(rc)][:, col_sets]  # (k, ncombos, k)
            mats = np.transpose(sub, (1, 0, 2))
            dets = _kernels.batch_det(mats)
            if np.any(np.abs(dets) > 1):
                return False
    return True
