from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fractonlab.codes import (
    CodeConstraintError,
    ErrorConfig,
    build_checkerboard,
    build_code,
    build_haah,
    commutation_violations,
    logical_qubit_count,
    read_parity,
    syndrome,
    write_parity,
)
from fractonlab.gf2 import rank_dense


def gf2_rank_numpy(m: np.ndarray) -> int:
    """Independent dense elimination for cross-checking k."""
    a = m.astype(bool).copy()
    r = 0
    for c in range(a.shape[1]):
        piv = np.flatnonzero(a[r:, c])
        if not piv.size:
            continue
        p = r + piv[0]
        a[[r, p]] = a[[p, r]]
        hit = a[:, c].copy()
        hit[r] = False
        a[hit] ^= a[r]
        r += 1
        if r == a.shape[0]:
            break
    return r


def checkerboard_oracle(L: int):
    """Direct construction: each even-parity cube carries its 8 corners."""
    stabs = []
    for x, y, z in itertools.product(range(L), repeat=3):
        if (x + y + z) % 2 == 0:
            stabs.append(sorted(((z + dz) % L * L + (y + dy) % L) * L + (x + dx) % L
                                for dx, dy, dz in itertools.product((0, 1), repeat=3)))
    return stabs


@pytest.mark.parametrize("L", [2, 4, 6])
def test_checkerboard_structure(L):
    code = build_checkerboard(L)
    assert code.n == L**3
    assert len(code.x_stabilizers) == len(code.z_stabilizers) == L**3 // 2
    assert all(len(s) == 8 for s in code.x_stabilizers + code.z_stabilizers)
    assert sorted(map(list, code.x_stabilizers)) == sorted(checkerboard_oracle(L))
    for q in range(code.n):
        assert len(code.stabilizers_on(q, "X")) == 4 and len(code.stabilizers_on(q, "Z")) == 4
    assert commutation_violations(code) == []


@pytest.mark.parametrize("L", [2, 3, 4, 5])
def test_haah_structure(L):
    code = build_haah(L)
    assert code.n == 2 * L**3
    assert len(code.x_stabilizers) == len(code.z_stabilizers) == L**3
    assert all(len(s) == 8 for s in code.x_stabilizers + code.z_stabilizers)
    for q in range(code.n):
        assert len(code.stabilizers_on(q, "X")) == 4 and len(code.stabilizers_on(q, "Z")) == 4
    assert commutation_violations(code) == []


@pytest.mark.parametrize("L", [1, 3, 5, 0, -2])
def test_checkerboard_rejects_bad_sizes(L):
    with pytest.raises(CodeConstraintError, match="even L"):
        build_checkerboard(L)


def test_haah_rejects_bad_sizes():
    with pytest.raises(CodeConstraintError):
        build_haah(1)
    with pytest.raises(ValueError):
        build_code("toric", 4)


@pytest.mark.parametrize("L,k", [(2, 6), (4, 18), (6, 30)])
def test_checkerboard_logical_qubits(L, k):
    # k = n - rank(H_X) - rank(H_Z) evaluated independently; equals 6L - 6 for these L
    code = build_checkerboard(L)
    independent = code.n - gf2_rank_numpy(code.parity_matrix("X")) - gf2_rank_numpy(code.parity_matrix("Z"))
    assert independent == k == 6 * L - 6
    assert logical_qubit_count(code) == k


@pytest.mark.parametrize("L,k", [(2, 6), (3, 2), (4, 14)])
def test_haah_logical_qubits(L, k):
    code = build_haah(L)
    independent = code.n - gf2_rank_numpy(code.parity_matrix("X")) - gf2_rank_numpy(code.parity_matrix("Z"))
    assert independent == k == logical_qubit_count(code)


@pytest.mark.parametrize("name,L", [("checkerboard", 4), ("haah", 2)])
def test_single_qubit_errors_violate_four(name, L):
    code = build_code(name, L)
    for sector in ("X", "Z"):
        for q in range(code.n):
            syn = syndrome(code, ErrorConfig({q}, sector))
            assert len(syn.violated) == 4
            assert syn.kind != sector


@given(st.sets(st.integers(0, 63), max_size=12), st.sets(st.integers(0, 63), max_size=12))
@settings(max_examples=50, deadline=None)
def test_syndrome_is_linear(a, b):
    code = build_checkerboard(4)
    sa = syndrome(code, ErrorConfig(a, "X")).violated
    sb = syndrome(code, ErrorConfig(b, "X")).violated
    assert syndrome(code, ErrorConfig(a ^ b, "X")).violated == sa ^ sb


@pytest.mark.parametrize("name,L", [("checkerboard", 4), ("haah", 3)])
def test_stabilizers_have_trivial_syndrome(name, L):
    code = build_code(name, L)
    for s in code.x_stabilizers:
        assert syndrome(code, ErrorConfig(s, "X")).violated == frozenset()
    for s in code.z_stabilizers:
        assert syndrome(code, ErrorConfig(s, "Z")).violated == frozenset()


def test_syndrome_rejects_bad_qubit():
    with pytest.raises(IndexError):
        syndrome(build_checkerboard(2), ErrorConfig({8}, "X"))


def test_parity_file_round_trip(tmp_path):
    code = build_haah(2)
    path = tmp_path / "h.txt"
    write_parity(code, path)
    n, xs, zs = read_parity(path)
    assert n == code.n and tuple(xs) == code.x_stabilizers and tuple(zs) == code.z_stabilizers
    assert path.read_text().splitlines()[0] == f"{code.n} {code.n // 2} {code.n // 2}"


def test_parity_matrix_rank_consistent():
    code = build_checkerboard(4)
    assert rank_dense(code.parity_matrix("X")) == gf2_rank_numpy(code.parity_matrix("X"))
