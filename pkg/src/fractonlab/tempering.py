"""Parallel tempering: ladders, replica exchange and mixing diagnostics."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .mc import DisorderedModel, ReplicaState, metropolis_sweep
from .rng import INIT, PILOT, REPLICA, SWAP, Stream


@dataclass(frozen=True)
class TemperatureLadder:
    betas: tuple[float, ...]

    def __post_init__(self):
        betas = tuple(float(b) for b in self.betas)
        if len(betas) < 2:
            raise ValueError("a ladder needs at least two temperatures")
        if any(b2 <= b1 for b1, b2 in zip(betas, betas[1:])):
            raise ValueError("ladder betas must be strictly increasing")
        object.__setattr__(self, "betas", betas)

    def __len__(self) -> int:
        return len(self.betas)


def build_ladder(beta_min: float, beta_max: float, n: int, scheme: str = "geometric") -> TemperatureLadder:
    if n < 2:
        raise ValueError("N_T must be at least 2")
    if not 0 < beta_min < beta_max:
        raise ValueError(f"need 0 < beta_min < beta_max, got {beta_min}, {beta_max}")
    if scheme == "linear":
        step = (beta_max - beta_min) / (n - 1)
        betas = [beta_min + k * step for k in range(n)]
    elif scheme == "geometric":
        ratio = (beta_max / beta_min) ** (1.0 / (n - 1))
        betas = [beta_min * ratio**k for k in range(n)]
    else:
        raise ValueError(f"unknown ladder scheme {scheme!r}")
    betas[0], betas[-1] = float(beta_min), float(beta_max)
    return TemperatureLadder(tuple(betas))


@dataclass(eq=False)
class PTState:
    """Replicas are indexed by identity; ``slot_of[r]`` is replica r's ladder slot.

    A round trip is counted when a replica returns to the bottom slot after
    having reached the top slot since its previous visit to the bottom.
    """

    ladder: TemperatureLadder
    replicas: list[ReplicaState]
    slot_of: np.ndarray
    swap_stream: Stream
    proposed: np.ndarray = field(default=None)
    accepted: np.ndarray = field(default=None)
    round_trips: np.ndarray = field(default=None)
    last_end: np.ndarray = field(default=None)  # -1 none, 0 bottom, 1 top
    parity: int = 0
    steps: int = 0

    def __post_init__(self):
        n = len(self.ladder)
        if self.proposed is None:
            self.proposed = np.zeros(n - 1, dtype=np.int64)
            self.accepted = np.zeros(n - 1, dtype=np.int64)
            self.round_trips = np.zeros(n, dtype=np.int64)
            self.last_end = np.full(n, -1, dtype=np.int64)
            self._mark_ends()

    @property
    def replica_at(self) -> np.ndarray:
        """Inverse permutation: slot -> replica identity."""
        inv = np.empty_like(self.slot_of)
        inv[self.slot_of] = np.arange(self.slot_of.shape[0])
        return inv

    def energies_by_slot(self) -> np.ndarray:
        return np.array([self.replicas[r].energy for r in self.replica_at], dtype=np.int64)

    def _mark_ends(self) -> None:
        top = len(self.ladder) - 1
        for r, slot in enumerate(self.slot_of):
            if slot == 0:
                if self.last_end[r] == 1:
                    self.round_trips[r] += 1
                self.last_end[r] = 0
            elif slot == top and self.last_end[r] == 0:
                self.last_end[r] = 1

    def to_dict(self) -> dict:
        return {
            "betas": [b.hex() for b in self.ladder.betas],
            "replicas": [r.to_dict() for r in self.replicas],
            "slot_of": self.slot_of.tolist(),
            "swap_key": self.swap_stream.key,
            "swap_counter": self.swap_stream.counter,
            "proposed": self.proposed.tolist(),
            "accepted": self.accepted.tolist(),
            "round_trips": self.round_trips.tolist(),
            "last_end": self.last_end.tolist(),
            "parity": self.parity,
            "steps": self.steps,
        }

    @classmethod
    def from_dict(cls, data: dict, model: DisorderedModel) -> "PTState":
        ladder = TemperatureLadder(tuple(float.fromhex(b) for b in data["betas"]))
        return cls(
            ladder=ladder,
            replicas=[ReplicaState.from_dict(r, model) for r in data["replicas"]],
            slot_of=np.array(data["slot_of"], dtype=np.int64),
            swap_stream=Stream(data["swap_key"], data["swap_counter"]),
            proposed=np.array(data["proposed"], dtype=np.int64),
            accepted=np.array(data["accepted"], dtype=np.int64),
            round_trips=np.array(data["round_trips"], dtype=np.int64),
            last_end=np.array(data["last_end"], dtype=np.int64),
            parity=int(data["parity"]),
            steps=int(data["steps"]),
        )


def init_pt(model: DisorderedModel, ladder: TemperatureLadder, seed: int, realization: int = 0,
            start: str = "cold", rule: str = "metropolis", purpose: int = REPLICA) -> PTState:
    """Replica r starts in slot r with stream (seed, realization, purpose, r).

    ``start`` is "cold" (all spins up) or "random".
    """
    replicas = []
    for r, beta in enumerate(ladder.betas):
        stream = Stream.from_parts(seed, realization, purpose, r)
        if start == "random":
            init = Stream.from_parts(seed, realization, INIT, r)
            replicas.append(ReplicaState.random_start(model, beta, stream, init, rule))
        elif start == "cold":
            replicas.append(ReplicaState.new(model, beta, stream, rule=rule))
        else:
            raise ValueError(f"unknown start {start!r}")
    return PTState(
        ladder=ladder,
        replicas=replicas,
        slot_of=np.arange(len(ladder), dtype=np.int64),
        swap_stream=Stream.from_parts(seed, realization, SWAP, purpose),
    )


def swap_pass(state: PTState) -> None:
    """Propose exchanges on adjacent slot pairs (s, s+1), s = parity, parity+2, ...

    The parity alternates between calls.
    """
    betas = state.ladder.betas
    at = state.replica_at
    for s in range(state.parity, len(betas) - 1, 2):
        a, b = at[s], at[s + 1]
        ra, rb = state.replicas[a], state.replicas[b]
        delta = (betas[s] - betas[s + 1]) * (ra.energy - rb.energy)
        u = state.swap_stream.uniform()
        state.proposed[s] += 1
        if delta >= 0 or u < math.exp(delta):
            state.accepted[s] += 1
            at[s], at[s + 1] = b, a
            state.slot_of[a], state.slot_of[b] = s + 1, s
            ra.beta, rb.beta = betas[s + 1], betas[s]
    state.parity ^= 1
    state._mark_ends()


def pt_step(state: PTState, model: DisorderedModel, sweeps_between_swaps: int = 10, n_micro: int = 1,
            swaps: bool = True, out: np.ndarray | None = None, backend: str | None = None) -> None:
    """Advance every replica, then run one swap pass.

    If ``out`` (shape (N_T, sweeps_between_swaps), int64) is given, ``out[slot, t]``
    receives the energy of the replica occupying ``slot`` after sweep t.
    """
    for r, rep in enumerate(state.replicas):
        rec = None if out is None else out[state.slot_of[r]]
        metropolis_sweep(rep, model, sweeps_between_swaps, n_micro, rec, backend)
    if swaps:
        swap_pass(state)
    state.steps += 1


@dataclass(frozen=True)
class MixingReport:
    acceptance: np.ndarray  # per adjacent pair, nan where nothing was proposed
    proposed: np.ndarray
    accepted: np.ndarray
    round_trips: np.ndarray

    @property
    def defined(self) -> np.ndarray:
        return self.proposed > 0


def mixing_report(state: PTState) -> MixingReport:
    with np.errstate(invalid="ignore", divide="ignore"):
        rate = np.where(state.proposed > 0, state.accepted / np.maximum(state.proposed, 1), np.nan)
    return MixingReport(rate, state.proposed.copy(), state.accepted.copy(), state.round_trips.copy())


@dataclass(frozen=True)
class TunedLadder:
    ladder: TemperatureLadder
    converged: bool
    acceptance: np.ndarray  # measured on the returned ladder
    iterations: int
    history: tuple = ()


def measure_acceptance(model: DisorderedModel, ladder: TemperatureLadder, seed: int, steps: int,
                       sweeps_between_swaps: int = 10, n_micro: int = 1, iteration: int = 0) -> np.ndarray:
    """Swap acceptance per pair from a pilot run; the first half of the steps is burn-in."""
    state = init_pt(model, ladder, seed, realization=iteration, start="random", purpose=PILOT)
    burn = steps // 2
    for _ in range(burn):
        pt_step(state, model, sweeps_between_swaps, n_micro)
    state.proposed[:] = 0
    state.accepted[:] = 0
    for _ in range(steps - burn):
        pt_step(state, model, sweeps_between_swaps, n_micro)
    return mixing_report(state).acceptance


def equalize_ladder(ladder: TemperatureLadder, acceptance: np.ndarray) -> TemperatureLadder:
    """Inverse-CDF repositioning: each interval carries "length" -ln(acceptance);
    interior betas are moved so that every new interval has equal length."""
    betas = np.asarray(ladder.betas)
    a = np.clip(np.nan_to_num(np.asarray(acceptance, dtype=float), nan=1.0), 1e-4, 1.0)
    length = -np.log(a) + 1e-6
    cum = np.concatenate([[0.0], np.cumsum(length)])
    targets = np.linspace(0.0, cum[-1], betas.shape[0])
    new = np.interp(targets, cum, betas)
    new[0], new[-1] = betas[0], betas[-1]
    if np.any(np.diff(new) <= 0):
        return ladder
    return TemperatureLadder(tuple(new.tolist()))


def tune_ladder(model: DisorderedModel, ladder: TemperatureLadder, target: float = 0.3,
                tolerance: float = 0.1, max_iter: int = 10, pilot_steps: int = 200,
                sweeps_between_swaps: int = 10, n_micro: int = 1, seed: int = 0) -> TunedLadder:
    """Equalize adjacent swap acceptances by iterated pilot runs; endpoints stay fixed.

    Converged when every pair lies within ``tolerance`` of ``target``. Otherwise the
    ladder with the smallest acceptance spread is returned with ``converged=False``
    and a warning.
    """
    best = None
    history = []
    current = ladder
    for it in range(max_iter):
        acc = measure_acceptance(model, current, seed, pilot_steps, sweeps_between_swaps, n_micro, it)
        history.append((current, acc))
        spread = float(np.nanmax(acc) - np.nanmin(acc))
        if best is None or spread < best[0]:
            best = (spread, current, acc, it + 1)
        if np.all(np.abs(acc - target) <= tolerance):
            return TunedLadder(current, True, acc, it + 1, tuple(history))
        nxt = equalize_ladder(current, acc)
        if nxt == current:
            break
        current = nxt
    warnings.warn("ladder tuning did not reach the target acceptance; returning the most uniform ladder",
                  RuntimeWarning, stacklevel=2)
    return TunedLadder(best[1], False, best[2], best[3], tuple(history))
