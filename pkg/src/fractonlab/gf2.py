"""GF(2) rank of sparse 0/1 matrices via bit-packed Gaussian elimination."""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from . import kernels


def pack_rows(supports: Iterable[Iterable[int]], n_cols: int) -> np.ndarray:
    """Pack rows given as column-index supports into uint64 words.

    Repeated indices cancel (addition mod 2).
    """
    supports = [list(s) for s in supports]
    n_words = max(1, (n_cols + 63) // 64)
    rows = np.zeros((len(supports), n_words), dtype=np.uint64)
    for r, cols in enumerate(supports):
        for c in cols:
            if not 0 <= c < n_cols:
                raise IndexError(f"column {c} outside [0, {n_cols})")
            rows[r, c >> 6] ^= np.uint64(1) << np.uint64(c & 63)
    return rows


def rank_supports(supports: Sequence[Iterable[int]], n_cols: int, backend: str | None = None) -> int:
    rows = pack_rows(supports, n_cols)
    if rows.shape[0] == 0:
        return 0
    return int(kernels.backend(backend).gf2_rank(rows, n_cols))


def rank_dense(matrix, backend: str | None = None) -> int:
    m = np.asarray(matrix) & 1
    if m.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    return rank_supports([np.flatnonzero(row) for row in m], m.shape[1], backend)


def transpose_supports(supports: Sequence[Iterable[int]], n_cols: int) -> list[list[int]]:
    cols: list[list[int]] = [[] for _ in range(n_cols)]
    for r, s in enumerate(supports):
        for c in s:
            cols[c].append(r)
    return cols
