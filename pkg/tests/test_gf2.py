from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fractonlab import kernels
from fractonlab.gf2 import pack_rows, rank_dense, rank_supports, transpose_supports

BACKENDS = ["python"] + (["compiled"] if kernels.has_compiled() else [])


def dense_rank_oracle(m: np.ndarray) -> int:
    """Textbook row reduction on a boolean matrix, written independently of the package."""
    a = (np.array(m) % 2).astype(bool)
    rank = 0
    rows, cols = a.shape
    for c in range(cols):
        pivot = next((r for r in range(rank, rows) if a[r, c]), None)
        if pivot is None:
            continue
        a[[rank, pivot]] = a[[pivot, rank]]
        for r in range(rows):
            if r != rank and a[r, c]:
                a[r] ^= a[rank]
        rank += 1
    return rank


@pytest.mark.parametrize("backend", BACKENDS)
@given(m=arrays(np.uint8, st.tuples(st.integers(1, 12), st.integers(1, 140)), elements=st.integers(0, 1)))
@settings(max_examples=60, deadline=None)
def test_rank_matches_oracle(backend, m):
    assert rank_dense(m, backend) == dense_rank_oracle(m)


def test_known_ranks():
    assert rank_dense(np.eye(70, dtype=np.uint8)) == 70
    assert rank_dense(np.ones((5, 5), dtype=np.uint8)) == 1
    assert rank_supports([], 10) == 0
    # a cycle's edge-incidence rows sum to zero
    assert rank_supports([(i, (i + 1) % 9) for i in range(9)], 9) == 8


def test_repeated_indices_cancel():
    assert rank_supports([(3, 3)], 5) == 0
    assert pack_rows([(0, 64, 64)], 70)[0].tolist() == [1, 0]


def test_out_of_range_column():
    with pytest.raises(IndexError):
        pack_rows([(10,)], 10)


def test_transpose():
    assert transpose_supports([(0, 2), (1, 2)], 3) == [[0], [1], [0, 1]]
