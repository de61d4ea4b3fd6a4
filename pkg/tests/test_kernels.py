import itertools
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cogef import _kernels
from cogef.linalg import bareiss_det

needs_numba = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not available")


@st.composite
def det_stacks(draw):
    k = draw(st.integers(0, 6))
    count = draw(st.integers(1, 12))
    vals = draw(st.lists(st.integers(-5, 5), min_size=count * k * k, max_size=count * k * k))
    return np.array(vals, dtype=np.int64).reshape(count, k, k)


@given(det_stacks())
def test_numpy_dets_are_exact(mats):
    got = _kernels.batch_det(mats, use_numba=False)
    want = [bareiss_det(m.tolist()) if m.size else 1 for m in mats]
    assert got.tolist() == want


@needs_numba
@given(det_stacks())
def test_numba_matches_numpy_dets(mats):
    assert np.array_equal(_kernels.batch_det(mats, use_numba=True), _kernels.batch_det(mats, use_numba=False))


@st.composite
def boxes(draw):
    n = draw(st.integers(1, 3))
    m = draw(st.integers(1, 4))
    A = np.array(draw(st.lists(st.integers(-3, 3), min_size=m * n, max_size=m * n)), dtype=np.int64).reshape(m, n)
    b = np.array(draw(st.lists(st.integers(-4, 4), min_size=m, max_size=m)), dtype=np.int64)
    lo = np.array(draw(st.lists(st.integers(-3, 0), min_size=n, max_size=n)), dtype=np.int64)
    hi = lo + np.array(draw(st.lists(st.integers(0, 4), min_size=n, max_size=n)), dtype=np.int64)
    return A, b, lo, hi


def brute_box(A, b, lo, hi):
    ranges = [range(int(l), int(h) + 1) for l, h in zip(lo, hi)]
    return [p for p in itertools.product(*ranges) if all(A @ np.array(p) <= b)]


@given(boxes())
def test_box_filter_numpy_matches_brute_force(box):
    A, b, lo, hi = box
    got = [tuple(r) for r in _kernels.box_filter(A, b, lo, hi, use_numba=False).tolist()]
    assert got == brute_box(A, b, lo, hi)


@needs_numba
@given(boxes())
def test_box_filter_paths_agree(box):
    A, b, lo, hi = box
    assert np.array_equal(_kernels.box_filter(A, b, lo, hi, use_numba=True),
                          _kernels.box_filter(A, b, lo, hi, use_numba=False))


def test_int64_guard():
    assert _kernels.int64_safe([[1, 2], [3, 4]], 2)
    assert not _kernels.int64_safe([[10 ** 6] * 8] * 8, 8)
    big = np.array([[2 ** 60]], dtype=np.int64)
    assert not _kernels.box_filter_safe(big, np.array([0]), [-10], [10])
    assert _kernels.box_filter_safe(np.array([[2, 1]]), np.array([3]), [-5, -5], [5, 5])


def test_env_flag_disables_numba():
    code = "from cogef import _kernels; print(_kernels.HAVE_NUMBA)"
    env = dict(os.environ, COGEF_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "False"
