"""Map a code sector to a disordered multi-spin Ising model.

For errors of Pauli type ``sector``, one Ising spin sits on every stabilizer of
that same type (their products generate equivalent errors) and every qubit ``i``
contributes the coupling ``eta_i * prod_{s in N(i)} sigma_s`` over the
stabilizers sharing it. Coupling ``i`` is owned by qubit ``i``; couplings are
therefore ordered like qubits. Stabilizers of the dual type become plaquettes:
products of couplings whose spin product is identically one, and the frustrated
plaquettes of a disorder realization are exactly the error syndrome.

Energies use J = 1: ``E = -sum_c eta_c prod_{i in c} sigma_i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import gf2
from .codes import StabilizerCode, _sector, dual
from .rng import DISORDER, Stream

FORMAT_HYPERGRAPH = "#fractonlab hypergraph v1"


@dataclass(frozen=True, eq=False)
class CouplingHypergraph:
    n_spins: int
    couplings: tuple[tuple[int, ...], ...]
    geometry: str = "generic"  # "checkerboard", "haah" or "generic"
    L: int | None = None
    sector: str | None = None
    spin_positions: np.ndarray | None = field(default=None, repr=False)
    coupling_anchors: np.ndarray | None = field(default=None, repr=False)  # x, y, z, parity
    plaquettes: tuple[tuple[int, ...], ...] = field(default=(), repr=False)

    @property
    def n_couplings(self) -> int:
        return len(self.couplings)

    @cached_property
    def cpl_ptr(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum([len(c) for c in self.couplings])]).astype(np.int64)

    @cached_property
    def cpl_spins(self) -> np.ndarray:
        if not self.couplings:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate([np.asarray(c, dtype=np.int64) for c in self.couplings])

    @cached_property
    def sp_ptr(self) -> np.ndarray:
        deg = np.bincount(self.cpl_spins, minlength=self.n_spins)
        return np.concatenate([[0], np.cumsum(deg)]).astype(np.int64)

    @cached_property
    def sp_cpl(self) -> np.ndarray:
        owner = np.repeat(np.arange(self.n_couplings, dtype=np.int64), np.diff(self.cpl_ptr))
        order = np.argsort(self.cpl_spins, kind="stable")
        return owner[order].astype(np.int64)

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.sp_ptr)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n_spins else 0

    def same_structure(self, other: "CouplingHypergraph") -> bool:
        def arr(a):
            return None if a is None else np.asarray(a).tolist()

        return (
            self.n_spins == other.n_spins
            and self.couplings == other.couplings
            and self.geometry == other.geometry
            and self.L == other.L
            and self.sector == other.sector
            and arr(self.spin_positions) == arr(other.spin_positions)
            and arr(self.coupling_anchors) == arr(other.coupling_anchors)
            and self.plaquettes == other.plaquettes
        )


@dataclass(frozen=True, eq=False)
class DisorderRealization:
    eta: np.ndarray
    p: float
    seed: int
    index: int = 0

    def __post_init__(self):
        eta = np.array(self.eta, dtype=np.int8)
        if eta.ndim != 1 or not np.all(np.abs(eta) == 1):
            raise ValueError("eta must be a 1-D array of +/-1")
        eta.setflags(write=False)
        object.__setattr__(self, "eta", eta)

    def __eq__(self, other):
        return (
            isinstance(other, DisorderRealization)
            and np.array_equal(self.eta, other.eta)
            and self.p == other.p
            and self.seed == other.seed
            and self.index == other.index
        )


@dataclass(frozen=True)
class NishimoriPoint:
    p: float
    beta: float

    @classmethod
    def from_p(cls, p: float) -> "NishimoriPoint":
        return cls(p, nishimori_beta(p))

    @classmethod
    def from_beta(cls, beta: float) -> "NishimoriPoint":
        return cls(nishimori_p(beta), beta)


def _anchor(code: StabilizerCode, sector: str, qubit: int) -> tuple[int, int, int, int]:
    x, y, z, f = (int(v) for v in code.site_coordinates[qubit])
    L = code.L
    if code.name == "checkerboard":
        if (x + y + z) % 2 == 0:
            return x, y, z, -1
        return (x - 1) % L, (y - 1) % L, (z - 1) % L, +1
    if sector == "X":
        return (x - 1) % L, (y - 1) % L, (z - 1) % L, (+1 if f == 1 else -1)
    return x, y, z, (-1 if f == 1 else +1)


def map_error_model(code: StabilizerCode, sector: str) -> CouplingHypergraph:
    """Ising hypergraph for independent errors of Pauli type ``sector``."""
    sector = _sector(sector)
    couplings = []
    for q in range(code.n):
        spins = tuple(sorted(code.stabilizers_on(q, sector)))
        if len(spins) != 4:
            raise RuntimeError(f"qubit {q} is shared by {len(spins)} stabilizers, expected 4")
        couplings.append(spins)
    anchors = np.array([_anchor(code, sector, q) for q in range(code.n)], dtype=np.int64)
    return CouplingHypergraph(
        n_spins=len(code.stabilizers(sector)),
        couplings=tuple(couplings),
        geometry=code.name,
        L=code.L,
        sector=sector,
        spin_positions=code.anchors(sector).copy(),
        coupling_anchors=anchors,
        plaquettes=code.stabilizers(dual(sector)),
    )


def random_hypergraph(n_spins: int, n_couplings: int, arity: int, seed: int) -> CouplingHypergraph:
    """Random k-body hypergraph for oracle tests; every spin gets at least one coupling."""
    if arity > n_spins:
        raise ValueError("arity exceeds spin count")
    rng = np.random.default_rng(seed)
    for _ in range(1000):
        couplings = tuple(
            tuple(sorted(rng.choice(n_spins, size=arity, replace=False).tolist())) for _ in range(n_couplings)
        )
        if len({i for c in couplings for i in c}) == n_spins:
            return CouplingHypergraph(n_spins=n_spins, couplings=couplings)
    raise ValueError("could not cover every spin; add couplings")


def sample_disorder(h: CouplingHypergraph, p: float, seed: int, index: int = 0) -> DisorderRealization:
    """Each coupling independently antiferromagnetic (eta = -1) with probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"error rate must lie in [0, 1], got {p}")
    u = Stream.from_parts(seed, index, DISORDER).uniforms(h.n_couplings)
    eta = np.where(u < p, -1, 1).astype(np.int8)
    return DisorderRealization(eta, float(p), int(seed), int(index))


def clean_disorder(h: CouplingHypergraph) -> DisorderRealization:
    return DisorderRealization(np.ones(h.n_couplings, dtype=np.int8), 0.0, 0)


def coupling_products(h: CouplingHypergraph, spins) -> np.ndarray:
    s = np.asarray(spins, dtype=np.int64)
    if s.shape[-1] != h.n_spins:
        raise ValueError(f"expected {h.n_spins} spins, got {s.shape[-1]}")
    if h.n_couplings == 0:
        return np.zeros(s.shape[:-1] + (0,), dtype=np.int64)
    return np.multiply.reduceat(s[..., h.cpl_spins], h.cpl_ptr[:-1], axis=-1)


def energy(h: CouplingHypergraph, d: DisorderRealization, spins) -> int:
    """Exact integer energy; ``spins`` may also be a batch (..., N_s)."""
    e = -(coupling_products(h, spins) * d.eta).sum(axis=-1)
    return int(e) if np.ndim(e) == 0 else e


def nishimori_beta(p: float) -> float:
    """Inverse temperature on the Nishimori line, exp(-2 beta) = p / (1 - p).

    p = 0 gives ``math.inf`` and p = 1 gives ``-math.inf``.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if p == 0.0:
        return math.inf
    if p == 1.0:
        return -math.inf
    return 0.5 * (math.log1p(-p) - math.log(p))


def nishimori_p(beta: float) -> float:
    if beta == math.inf:
        return 0.0
    if beta == -math.inf:
        return 1.0
    # 1 / (1 + e^{2 beta}) without overflow
    if beta >= 0:
        t = math.exp(-2.0 * beta)
        return t / (1.0 + t)
    return 1.0 / (1.0 + math.exp(2.0 * beta))


def classical_gsd_exponent(h: CouplingHypergraph) -> int:
    """log2 of the clean-model ground-state degeneracy: N_s - rank(incidence)."""
    return h.n_spins - gf2.rank_supports(h.couplings, h.n_spins)


def flip_couplings(d: DisorderRealization, couplings: Iterable[int]) -> DisorderRealization:
    """Copy of ``d`` with eta negated on ``couplings`` (repeats cancel pairwise)."""
    eta = d.eta.copy()
    n = eta.shape[0]
    for c in couplings:
        c = int(c)
        if not 0 <= c < n:
            raise IndexError(f"coupling {c} outside [0, {n})")
        eta[c] = -eta[c]
    return DisorderRealization(eta, d.p, d.seed, d.index)


def frustrated_plaquettes(h: CouplingHypergraph, d: DisorderRealization) -> frozenset[int]:
    """Plaquettes whose eta product is -1; equals the syndrome of the error eta encodes."""
    return frozenset(k for k, plaq in enumerate(h.plaquettes) if np.prod(d.eta[list(plaq)]) < 0)


def plane_flip(h: CouplingHypergraph, axis: int, coordinate: int) -> np.ndarray:
    """Boolean mask of spins lying in the plane ``position[axis] == coordinate``."""
    if h.spin_positions is None:
        raise ValueError("hypergraph carries no spin positions")
    return h.spin_positions[:, axis] == coordinate


# -- text formats -----------------------------------------------------------------


def write_hypergraph(h: CouplingHypergraph, path: str | Path) -> None:
    lines = [FORMAT_HYPERGRAPH, f"{h.geometry} {h.L if h.L is not None else 0} {h.sector or '-'} "
             f"{h.n_spins} {h.n_couplings} {len(h.plaquettes)}"]
    for i in range(h.n_spins):
        pos = h.spin_positions[i] if h.spin_positions is not None else ("-", "-", "-")
        lines.append("s " + " ".join(map(str, pos)))
    for c, spins in enumerate(h.couplings):
        anc = h.coupling_anchors[c] if h.coupling_anchors is not None else ("-",) * 4
        lines.append("c " + " ".join(map(str, anc)) + " : " + " ".join(map(str, spins)))
    for plaq in h.plaquettes:
        lines.append("q " + " ".join(map(str, plaq)))
    Path(path).write_text("\n".join(lines) + "\n")


def read_hypergraph(path: str | Path) -> CouplingHypergraph:
    lines = Path(path).read_text().splitlines()
    if lines[0] != FORMAT_HYPERGRAPH:
        raise ValueError(f"{path}: not a hypergraph file")
    geometry, L, sector, ns, nc, nq = lines[1].split()
    ns, nc, nq = int(ns), int(nc), int(nq)
    body = lines[2:]
    pos = [ln.split()[1:] for ln in body[:ns]]
    positions = None if ns and pos[0][0] == "-" else np.array(pos, dtype=np.int64).reshape(ns, 3)
    couplings, anchors = [], []
    for ln in body[ns:ns + nc]:
        head, spins = ln[2:].split(":")
        couplings.append(tuple(map(int, spins.split())))
        anchors.append(head.split())
    anchor_arr = None if nc and anchors[0][0] == "-" else np.array(anchors, dtype=np.int64).reshape(nc, 4)
    plaqs = tuple(tuple(map(int, ln.split()[1:])) for ln in body[ns + nc:ns + nc + nq])
    return CouplingHypergraph(
        n_spins=ns,
        couplings=tuple(couplings),
        geometry=geometry,
        L=int(L) or None,
        sector=None if sector == "-" else sector,
        spin_positions=positions,
        coupling_anchors=anchor_arr,
        plaquettes=plaqs,
    )


def write_disorder(d: DisorderRealization, path: str | Path) -> None:
    """Header ``p seed n_couplings``, then one sign per line."""
    lines = [f"{d.p!r} {d.seed} {d.eta.shape[0]}"]
    lines += [f"{int(v):+d}" for v in d.eta]
    Path(path).write_text("\n".join(lines) + "\n")


def read_disorder(path: str | Path) -> DisorderRealization:
    lines = Path(path).read_text().splitlines()
    head = lines[0].split()
    if len(head) != 3:
        raise ValueError(f"{path}: expected header 'p seed n_couplings'")
    p, seed, n = float(head[0]), int(head[1]), int(head[2])
    eta = np.array([int(v) for v in lines[1:1 + n]], dtype=np.int8)
    if eta.shape[0] != n:
        raise ValueError(f"{path}: expected {n} signs, found {eta.shape[0]}")
    return DisorderRealization(eta, p, seed)


def spins_from_mask(n: int, flipped: Sequence[bool] | np.ndarray) -> np.ndarray:
    s = np.ones(n, dtype=np.int8)
    s[np.asarray(flipped, dtype=bool)] = -1
    return s
