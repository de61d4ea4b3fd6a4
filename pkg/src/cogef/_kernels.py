"""Integer hot loops: batched minor determinants and lattice-box filtering.

Both kernels run in int64 and are only called when the caller has checked
that no intermediate value can overflow (see :func:`int64_safe`).  Each has
an ``@njit`` version and a pure-numpy version; ``COGEF_DISABLE_NUMBA=1``
forces the numpy path, as does a missing numba install.
"""

from __future__ import annotations

import os
import numpy as np

_INT64_LIMIT = 2**62

try:  # pragma: no cover - exercised implicitly
    if os.environ.get("COGEF_DISABLE_NUMBA", "").strip() not in ("", "0"):
        raise ImportError("disabled by COGEF_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


# below this many items the numpy path beats a cold JIT load
SMALL_BATCH = 1 << 16


def int64_safe(rows, k: int) -> bool:
    """True when Bareiss on any k x k submatrix of ``rows`` stays in int64.

    Intermediate Bareiss entries are k x k minors and the update forms the
    product of two of them, so the square of the Hadamard-type bound
    ``(max_row_norm)^k`` must fit.
    """
    if k == 0:
        return True
    worst = 0
    for r in rows:
        worst = max(worst, sum(int(v) * int(v) for v in r))
    if worst == 0:
        return True
    bound_sq = worst**k  # (||row||^k)^2
    return bound_sq < _INT64_LIMIT


# -------------------------------------------------------------------------
# batched determinants

def _bareiss_numpy(mats: np.ndarray) -> np.ndarray:
    """Vectorised Bareiss over a stack of k x k int64 matrices."""
    a = mats.astype(np.int64, copy=True)
    count, k, _ = a.shape
    if k == 0:
        return np.ones(count, dtype=np.int64)
    sign = np.ones(count, dtype=np.int64)
    prev = np.ones(count, dtype=np.int64)
    alive = np.ones(count, dtype=bool)
    idx = np.arange(count)
    for c in range(k - 1):
        col = a[:, c:, c]
        nz = col != 0
        has = nz.any(axis=1)
        alive &= has
        first = np.where(has, nz.argmax(axis=1), 0) + c
        swap = first != c
        if swap.any():
            rows_c = a[idx[swap], c, :].copy()
            a[idx[swap], c, :] = a[idx[swap], first[swap], :]
            a[idx[swap], first[swap], :] = rows_c
            sign[swap] = -sign[swap]
        piv = a[:, c, c].copy()
        piv[~alive] = 1
        lower = a[:, c + 1:, c + 1:]
        factor = a[:, c + 1:, c][:, :, None]
        top = a[:, c, c + 1:][:, None, :]
        num = piv[:, None, None] * lower - factor * top
        a[:, c + 1:, c + 1:] = num // prev[:, None, None]
        prev = piv
    det = sign * a[:, k - 1, k - 1]
    det[~alive] = 0
    return det


@njit(cache=True)
def _bareiss_numba(mats):
    count, k, _ = mats.shape
    out = np.empty(count, dtype=np.int64)
    a = np.empty((k, k), dtype=np.int64)
    for t in range(count):
        for i in range(k):
            for j in range(k):
                a[i, j] = mats[t, i, j]
        sign = 1
        prev = 1
        dead = False
        for c in range(k - 1):
            if a[c, c] == 0:
                p = -1
                for i in range(c + 1, k):
                    if a[i, c] != 0:
                        p = i
                        break
                if p < 0:
                    dead = True
                    break
                for j in range(k):
                    tmp = a[c, j]
                    a[c, j] = a[p, j]
                    a[p, j] = tmp
                sign = -sign
            piv = a[c, c]
            for i in range(c + 1, k):
                f = a[i, c]
                for j in range(c + 1, k):
                    a[i, j] = (piv * a[i, j] - f * a[c, j]) // prev
            prev = piv
        if dead:
            out[t] = 0
        elif k == 0:
            out[t] = 1
        else:
            out[t] = sign * a[k - 1, k - 1]
    return out


def batch_det(mats: np.ndarray, use_numba: bool | None = None) -> np.ndarray:
    """Exact determinants of a (count, k, k) int64 stack."""
    mats = np.ascontiguousarray(mats, dtype=np.int64)
    if use_numba is None:
        use_numba = HAVE_NUMBA and mats.shape[0] >= SMALL_BATCH
    if use_numba and HAVE_NUMBA:
        return _bareiss_numba(mats)
    return _bareiss_numpy(mats)


# -------------------------------------------------------------------------
# lattice box filter

@njit(cache=True)
def _box_filter_numba(A, b, lo, hi):
    m, n = A.shape
    total = 1
    for i in range(n):
        total *= hi[i] - lo[i] + 1
    x = lo.copy()
    buf = np.empty((1024, n), dtype=np.int64)
    cap = 1024
    found = 0
    for _ in range(total):
        ok = True
        for r in range(m):
            s = 0
            for j in range(n):
                s += A[r, j] * x[j]
            if s > b[r]:
                ok = False
                break
        if ok:
            if found == cap:
                nb = np.empty((cap * 2, n), dtype=np.int64)
                nb[:cap] = buf
                buf = nb
                cap *= 2
            buf[found] = x
            found += 1
        # odometer increment, last coordinate fastest
        j = n - 1
        while j >= 0:
            x[j] += 1
            if x[j] <= hi[j]:
                break
            x[j] = lo[j]
            j -= 1
    return buf[:found].copy()


def _box_filter_numpy(A, b, lo, hi, chunk: int = 1 << 18):
    n = A.shape[1]
    sizes = hi - lo + 1
    total = int(np.prod(sizes))
    kept = []
    for start in range(0, total, chunk):
        flat = np.arange(start, min(total, start + chunk), dtype=np.int64)
        pts = np.empty((flat.size, n), dtype=np.int64)
        rem = flat
        for j in range(n - 1, -1, -1):
            pts[:, j] = rem % sizes[j] + lo[j]
            rem = rem // sizes[j]
        ok = np.all(pts @ A.T <= b, axis=1)
        kept.append(pts[ok])
    if not kept:
        return np.empty((0, n), dtype=np.int64)
    return np.concatenate(kept, axis=0)


def box_filter(A, b, lo, hi, use_numba: bool | None = None) -> np.ndarray:
    """All integer x with lo <= x <= hi and A x <= b, in odometer order."""
    A = np.ascontiguousarray(A, dtype=np.int64)
    b = np.ascontiguousarray(b, dtype=np.int64)
    lo = np.ascontiguousarray(lo, dtype=np.int64)
    hi = np.ascontiguousarray(hi, dtype=np.int64)
    if use_numba is None:
        use_numba = HAVE_NUMBA and int(np.prod(hi - lo + 1)) >= SMALL_BATCH
    if use_numba and HAVE_NUMBA:
        return _box_filter_numba(A, b, lo, hi)
    return _box_filter_numpy(A, b, lo, hi)


def box_filter_safe(A, b, lo, hi) -> bool:
    """Whether A x and the comparison against b fit in int64 over the box."""
    reach = max(max(abs(int(v)) for v in lo), max(abs(int(v)) for v in hi), 1)
    for r in A:
        if sum(abs(int(v)) for v in r) * reach >= _INT64_LIMIT:
            return False
    return all(abs(int(v)) < _INT64_LIMIT for v in b)


__all__ = ["HAVE_NUMBA", "batch_det", "box_filter", "box_filter_safe", "int64_safe"]
