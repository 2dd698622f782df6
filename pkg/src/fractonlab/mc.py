"""Single-replica Markov chains: Metropolis and zero-cost (microcanonical) sweeps.

Each replica keeps ``bond[c] = eta_c * prod_{i in c} sigma_i`` alongside its
spins, so the energy change of flipping spin ``i`` is ``2 * sum_{c ni i} bond[c]``
and the cached energy is ``-sum(bond)``, all in exact integer arithmetic.

Ising spins admit no continuous overrelaxation; the discrete analogue used here
flips any spin whose local field vanishes (a move at exactly zero energy cost),
which drifts the configuration along the flat directions created by the planar
and fractal symmetries without altering the energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .mapping import CouplingHypergraph, DisorderRealization, coupling_products, energy
from .rng import Stream

_EMPTY = np.zeros(0, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class AdjacencyIndex:
    """CSR neighbourhood tables shared by every replica of one model."""

    sp_ptr: np.ndarray
    sp_cpl: np.ndarray
    cpl_ptr: np.ndarray
    cpl_spins: np.ndarray
    max_degree: int

    @classmethod
    def from_hypergraph(cls, h: CouplingHypergraph) -> "AdjacencyIndex":
        return cls(h.sp_ptr, h.sp_cpl, h.cpl_ptr, h.cpl_spins, h.max_degree)


@dataclass(eq=False)
class DisorderedModel:
    """A hypergraph paired with one disorder realization."""

    hypergraph: CouplingHypergraph
    disorder: DisorderRealization
    adjacency: AdjacencyIndex = field(init=False)

    def __post_init__(self):
        if self.disorder.eta.shape[0] != self.hypergraph.n_couplings:
            raise ValueError("disorder length does not match coupling count")
        self.adjacency = AdjacencyIndex.from_hypergraph(self.hypergraph)

    @property
    def n_spins(self) -> int:
        return self.hypergraph.n_spins

    @property
    def n_couplings(self) -> int:
        return self.hypergraph.n_couplings

    def energy(self, spins) -> int:
        return energy(self.hypergraph, self.disorder, spins)

    def bonds(self, spins) -> np.ndarray:
        return (coupling_products(self.hypergraph, spins) * self.disorder.eta).astype(np.int8)


def acceptance_table(beta: float, max_degree: int, rule: str = "metropolis") -> np.ndarray:
    """``table[s]`` = acceptance probability of a move with local sum s > 0 (dE = 2s).

    ``rule="corrupted"`` halves the exponent; it exists only as a negative control
    for the oracle suite.
    """
    s = np.arange(max_degree + 1)
    if rule == "metropolis":
        return np.array([math.exp(-2.0 * beta * k) for k in s.tolist()], dtype=np.float64)
    if rule == "corrupted":
        return np.array([math.exp(-beta * k) for k in s.tolist()], dtype=np.float64)
    raise ValueError(f"unknown acceptance rule {rule!r}")


@dataclass(eq=False)
class ReplicaState:
    spins: np.ndarray
    bond: np.ndarray
    energy: int
    beta: float
    stream: Stream
    sweep_count: int = 0
    rule: str = "metropolis"
    _order: np.ndarray = field(default=None, repr=False)
    _table: tuple = field(default=None, repr=False)

    @classmethod
    def new(cls, model: DisorderedModel, beta: float, stream: Stream, spins=None,
            rule: str = "metropolis") -> "ReplicaState":
        if spins is None:
            spins = np.ones(model.n_spins, dtype=np.int8)
        spins = np.array(spins, dtype=np.int8)
        if spins.shape != (model.n_spins,) or not np.all(np.abs(spins) == 1):
            raise ValueError("spins must be +/-1 with one entry per spin")
        bond = model.bonds(spins)
        return cls(spins, bond, -int(bond.sum(dtype=np.int64)), float(beta), stream, 0, rule)

    @classmethod
    def random_start(cls, model: DisorderedModel, beta: float, stream: Stream, init: Stream,
                     rule: str = "metropolis") -> "ReplicaState":
        spins = np.where(init.uniforms(model.n_spins) < 0.5, -1, 1).astype(np.int8)
        return cls.new(model, beta, stream, spins, rule)

    def accept_table(self, max_degree: int) -> np.ndarray:
        key = (self.beta, max_degree, self.rule)
        if self._table is None or self._table[0] != key:
            self._table = (key, acceptance_table(self.beta, max_degree, self.rule))
        return self._table[1]

    def order_buffer(self) -> np.ndarray:
        if self._order is None or self._order.shape[0] != self.spins.shape[0]:
            self._order = np.empty(self.spins.shape[0], dtype=np.int64)
        return self._order

    def check(self, model: DisorderedModel) -> None:
        """Assert the cached energy and bonds agree with a full recount."""
        e = model.energy(self.spins)
        if e != self.energy or not np.array_equal(model.bonds(self.spins), self.bond):
            raise AssertionError(f"energy cache incoherent: cached {self.energy}, recount {e}")

    def copy(self) -> "ReplicaState":
        return ReplicaState(self.spins.copy(), self.bond.copy(), self.energy, self.beta,
                            self.stream.copy(), self.sweep_count, self.rule)

    def to_dict(self) -> dict:
        return {
            "spins": self.spins.tolist(),
            "energy": int(self.energy),
            "beta": self.beta.hex(),
            "key": self.stream.key,
            "counter": self.stream.counter,
            "sweep_count": self.sweep_count,
            "rule": self.rule,
        }

    @classmethod
    def from_dict(cls, data: dict, model: DisorderedModel) -> "ReplicaState":
        state = cls.new(model, float.fromhex(data["beta"]), Stream(data["key"], data["counter"]),
                        data["spins"], data.get("rule", "metropolis"))
        state.sweep_count = int(data["sweep_count"])
        if state.energy != data["energy"]:
            raise ValueError("checkpointed energy does not match configuration")
        return state


def local_delta_e(state: ReplicaState, model: DisorderedModel, i: int) -> int:
    """Energy change of flipping spin ``i``."""
    adj = model.adjacency
    return 2 * int(state.bond[adj.sp_cpl[adj.sp_ptr[i]:adj.sp_ptr[i + 1]]].sum(dtype=np.int64))


def metropolis_sweep(state: ReplicaState, model: DisorderedModel, n_sweeps: int = 1,
                     n_micro: int = 0, record: np.ndarray | None = None,
                     backend: str | None = None) -> int:
    """Advance ``n_sweeps`` Metropolis sweeps, each followed by ``n_micro`` zero-cost sweeps.

    Each sweep proposes every spin once in a fresh random order. If given,
    ``record[t]`` receives the energy after sweep ``t``. Returns accepted moves.
    """
    adj = model.adjacency
    out = _EMPTY if record is None else record
    if record is not None and (record.dtype != np.int64 or record.shape[0] < n_sweeps):
        raise ValueError("record must be an int64 array with room for n_sweeps entries")
    e, counter, accepted, _ = kernels.backend(backend).sweeps(
        state.spins, state.bond, adj.sp_ptr, adj.sp_cpl, state.accept_table(adj.max_degree),
        state.stream.key, state.stream.counter, int(n_sweeps), int(n_micro), int(state.energy),
        out, state.order_buffer(),
    )
    state.energy = int(e)
    state.stream.counter = int(counter)
    state.sweep_count += int(n_sweeps)
    return int(accepted)


def microcanonical_sweep(state: ReplicaState, model: DisorderedModel, n_sweeps: int = 1,
                         backend: str | None = None) -> int:
    """Flip every spin whose flip costs exactly zero energy; returns the flip count."""
    adj = model.adjacency
    counter, flips = kernels.backend(backend).micro_sweeps(
        state.spins, state.bond, adj.sp_ptr, adj.sp_cpl, state.stream.key, state.stream.counter,
        int(n_sweeps), state.order_buffer(),
    )
    state.stream.counter = int(counter)
    return int(flips)
