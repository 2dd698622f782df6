"""Checkerboard and Haah cubic codes on periodic L x L x L lattices.

Indexing is lexicographic in (z, y, x, family): qubit ``((z*L + y)*L + x)*F + family-1``
with F qubits per site, and stabilizers are ordered by the (z, y, x) corner of
their cube.

Haah stabilizer supports, as (offset from the cube's (0,0,0) corner, family)::

    X type: (x,2) (y,2) (x+y,1) (z,2) (z+x,1) (z+y,1) (x+y+z,1) (x+y+z,2)
    Z type: (0,1) (0,2) (x,2) (y,2) (x+y,1) (z,2) (z+x,1) (z+y,1)

The X type reproduces the fractal Ising model
``-sum_v eta+ s_v s_{v+x} s_{v+y} s_{v+z} + eta- s_v s_{v+x+y} s_{v+y+z} s_{v+x+z}``
under the X-error mapping; the Z type is its polynomial conjugate, which is
the unique completion that commutes with it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from . import gf2

SECTORS = ("X", "Z")

HAAH_X_OFFSETS = (
    ((1, 0, 0), 2), ((0, 1, 0), 2), ((1, 1, 0), 1), ((0, 0, 1), 2),
    ((1, 0, 1), 1), ((0, 1, 1), 1), ((1, 1, 1), 1), ((1, 1, 1), 2),
)
HAAH_Z_OFFSETS = (
    ((0, 0, 0), 1), ((0, 0, 0), 2), ((1, 0, 0), 2), ((0, 1, 0), 2),
    ((1, 1, 0), 1), ((0, 0, 1), 2), ((1, 0, 1), 1), ((0, 1, 1), 1),
)
CUBE_OFFSETS = tuple(((dx, dy, dz), 1) for dz, dy, dx in itertools.product((0, 1), repeat=3))


class CodeConstraintError(ValueError):
    """Raised when a lattice size violates a code's construction constraint."""


@dataclass(frozen=True, eq=False)
class StabilizerCode:
    name: str
    L: int
    n: int
    x_stabilizers: tuple[tuple[int, ...], ...]
    z_stabilizers: tuple[tuple[int, ...], ...]
    site_coordinates: np.ndarray = field(repr=False)  # (n, 4): x, y, z, family
    x_anchors: np.ndarray = field(repr=False)  # (m_x, 3) cube corners
    z_anchors: np.ndarray = field(repr=False)

    def stabilizers(self, kind: str) -> tuple[tuple[int, ...], ...]:
        return self.x_stabilizers if _sector(kind) == "X" else self.z_stabilizers

    def anchors(self, kind: str) -> np.ndarray:
        return self.x_anchors if _sector(kind) == "X" else self.z_anchors

    @cached_property
    def _qubit_to_stabs(self) -> dict[str, list[list[int]]]:
        return {k: gf2.transpose_supports(self.stabilizers(k), self.n) for k in SECTORS}

    def stabilizers_on(self, qubit: int, kind: str) -> list[int]:
        """Indices of ``kind``-type stabilizers whose support contains ``qubit``."""
        return self._qubit_to_stabs[_sector(kind)][qubit]

    def parity_matrix(self, kind: str) -> np.ndarray:
        stabs = self.stabilizers(kind)
        m = np.zeros((len(stabs), self.n), dtype=np.uint8)
        for r, s in enumerate(stabs):
            m[r, list(s)] = 1
        return m


@dataclass(frozen=True)
class ErrorConfig:
    flipped_qubits: frozenset[int]
    sector: str  # Pauli type of the error

    def __post_init__(self):
        object.__setattr__(self, "flipped_qubits", frozenset(int(q) for q in self.flipped_qubits))
        object.__setattr__(self, "sector", _sector(self.sector))


@dataclass(frozen=True)
class Syndrome:
    violated: frozenset[int]
    kind: str  # type of the violated stabilizers (dual to the error)


def _sector(kind: str) -> str:
    kind = str(kind).upper()
    if kind not in SECTORS:
        raise ValueError(f"sector must be 'X' or 'Z', got {kind!r}")
    return kind


def dual(kind: str) -> str:
    return "Z" if _sector(kind) == "X" else "X"


def _build(name: str, L: int, families: int, cubes, x_offsets, z_offsets) -> StabilizerCode:
    def qubit(x, y, z, f):
        return (((z % L) * L + y % L) * L + x % L) * families + f - 1

    def support(corner, offsets):
        x, y, z = corner
        s = sorted({qubit(x + dx, y + dy, z + dz, f) for (dx, dy, dz), f in offsets})
        if len(s) != len(offsets):
            raise RuntimeError(f"{name}: stabilizer support collapsed at L={L}")
        return tuple(s)

    coords = np.array(
        [(x, y, z, f) for z in range(L) for y in range(L) for x in range(L) for f in range(1, families + 1)],
        dtype=np.int64,
    )
    anchors = np.array(cubes, dtype=np.int64).reshape(-1, 3)
    return StabilizerCode(
        name=name,
        L=L,
        n=families * L**3,
        x_stabilizers=tuple(support(c, x_offsets) for c in cubes),
        z_stabilizers=tuple(support(c, z_offsets) for c in cubes),
        site_coordinates=coords,
        x_anchors=anchors,
        z_anchors=anchors.copy(),
    )


def build_checkerboard(L: int) -> StabilizerCode:
    """Checkerboard code: A and B stabilizers on every cube whose corner has even x+y+z."""
    if not isinstance(L, (int, np.integer)) or L < 2 or L % 2:
        raise CodeConstraintError(f"checkerboard code needs an even L >= 2, got {L!r}")
    L = int(L)
    cubes = [(x, y, z) for z in range(L) for y in range(L) for x in range(L) if (x + y + z) % 2 == 0]
    return _build("checkerboard", L, 1, cubes, CUBE_OFFSETS, CUBE_OFFSETS)


def build_haah(L: int) -> StabilizerCode:
    if not isinstance(L, (int, np.integer)) or L < 2:
        raise CodeConstraintError(f"Haah code needs L >= 2, got {L!r}")
    L = int(L)
    cubes = [(x, y, z) for z in range(L) for y in range(L) for x in range(L)]
    return _build("haah", L, 2, cubes, HAAH_X_OFFSETS, HAAH_Z_OFFSETS)


BUILDERS = {"checkerboard": build_checkerboard, "haah": build_haah}


def build_code(name: str, L: int) -> StabilizerCode:
    try:
        builder = BUILDERS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown code {name!r}; choose from {sorted(BUILDERS)}") from None
    return builder(L)


def syndrome(code: StabilizerCode, error: ErrorConfig) -> Syndrome:
    """Stabilizers of the dual type that anticommute with the error."""
    kind = dual(error.sector)
    violated: set[int] = set()
    for q in error.flipped_qubits:
        if not 0 <= q < code.n:
            raise IndexError(f"qubit {q} outside [0, {code.n})")
        violated.symmetric_difference_update(code.stabilizers_on(q, kind))
    return Syndrome(frozenset(violated), kind)


def logical_qubit_count(code: StabilizerCode) -> int:
    rx = gf2.rank_supports(code.x_stabilizers, code.n)
    rz = gf2.rank_supports(code.z_stabilizers, code.n)
    return code.n - rx - rz


def commutation_violations(code: StabilizerCode) -> list[tuple[int, int]]:
    """(x, z) stabilizer pairs with odd overlap; empty for a valid code."""
    bad = []
    for i, xs in enumerate(code.x_stabilizers):
        touched: dict[int, int] = {}
        for q in xs:
            for j in code.stabilizers_on(q, "Z"):
                touched[j] = touched.get(j, 0) + 1
        bad.extend((i, j) for j, k in touched.items() if k % 2)
    return bad


def write_parity(code: StabilizerCode, path: str | Path) -> None:
    """Header ``n m_x m_z``, then one line of sorted qubit indices per stabilizer (X first)."""
    lines = [f"{code.n} {len(code.x_stabilizers)} {len(code.z_stabilizers)}"]
    lines += [" ".join(map(str, s)) for s in code.x_stabilizers + code.z_stabilizers]
    Path(path).write_text("\n".join(lines) + "\n")


def read_parity(path: str | Path) -> tuple[int, list[tuple[int, ...]], list[tuple[int, ...]]]:
    lines = Path(path).read_text().splitlines()
    n, mx, mz = map(int, lines[0].split())
    rows = [tuple(map(int, line.split())) for line in lines[1:1 + mx + mz]]
    if len(rows) != mx + mz:
        raise ValueError("parity file truncated")
    return n, rows[:mx], rows[mx:]
