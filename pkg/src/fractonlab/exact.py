"""Brute-force ground truth for small disordered hypergraphs.

Everything derives from the exact density of states ``g(E)``: a Gray-code walk
visits all 2**N_s configurations once, so a single enumeration serves every
inverse temperature. Thermodynamics are evaluated in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import kernels
from .mapping import CouplingHypergraph, DisorderRealization, flip_couplings

MAX_SPINS = 24


class OracleSizeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Exact density of states on the grid E = -N_c, -N_c + 2, ..., N_c."""

    energies: np.ndarray
    counts: np.ndarray  # int64, sums to 2**N_s

    def log_weights(self, beta: float) -> np.ndarray:
        with np.errstate(divide="ignore"):
            lg = np.log(self.counts.astype(np.float64))
        return lg - beta * self.energies

    def log_z(self, beta: float) -> float:
        lw = self.log_weights(beta)
        m = lw.max()
        return float(m + math.log(np.exp(lw - m).sum()))

    def probabilities(self, beta: float) -> np.ndarray:
        lw = self.log_weights(beta)
        w = np.exp(lw - lw.max())
        return w / w.sum()


@dataclass(frozen=True, eq=False)
class ExactSolution:
    beta: float
    log_z: float
    mean_energy: float
    mean_energy_sq: float
    energies: np.ndarray
    p_of_e: np.ndarray
    correlator: np.ndarray | None = None

    @property
    def energy_variance(self) -> float:
        return float(np.sum(self.p_of_e * (self.energies - self.mean_energy) ** 2))

    def distribution(self) -> dict[int, float]:
        return {int(e): float(p) for e, p in zip(self.energies, self.p_of_e) if p > 0}


def _check_size(h: CouplingHypergraph) -> None:
    if h.n_spins > MAX_SPINS:
        raise OracleSizeError(f"{h.n_spins} spins exceeds the enumeration cap of {MAX_SPINS}")


def energy_spectrum(h: CouplingHypergraph, d: DisorderRealization, backend: str | None = None) -> Spectrum:
    _check_size(h)
    nc = h.n_couplings
    counts = np.zeros(nc + 1, dtype=np.int64)
    kernels.backend(backend).energy_spectrum(h.n_spins, h.sp_ptr, h.sp_cpl, np.ascontiguousarray(d.eta), counts)
    return Spectrum(np.arange(-nc, nc + 1, 2, dtype=np.int64), counts)


def all_configurations(n_spins: int) -> np.ndarray:
    """All 2**n spin configurations as rows of +/-1 (bit k of the row index = spin k down)."""
    idx = np.arange(1 << n_spins, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(n_spins)) & 1
    return (1 - 2 * bits).astype(np.int8)


def brute_spectrum(h: CouplingHypergraph, d: DisorderRealization) -> Spectrum:
    """Second, independent enumerator: coupling products from bit-mask parities."""
    if h.n_spins > 22:
        raise OracleSizeError("brute_spectrum is limited to 22 spins")
    states = np.arange(1 << h.n_spins, dtype=np.int64)
    e = np.zeros(states.shape[0], dtype=np.int64)
    for c, spins in enumerate(h.couplings):
        mask = 0
        for i in spins:
            mask ^= 1 << i
        x = states & mask
        parity = np.zeros_like(x)
        while np.any(x):
            parity ^= x & 1
            x >>= 1
        e -= int(d.eta[c]) * (1 - 2 * parity)
    nc = h.n_couplings
    counts = np.bincount((e + nc) // 2, minlength=nc + 1).astype(np.int64)
    return Spectrum(np.arange(-nc, nc + 1, 2, dtype=np.int64), counts)


def solve(spectrum: Spectrum, beta: float) -> ExactSolution:
    p = spectrum.probabilities(beta)
    e = spectrum.energies.astype(np.float64)
    return ExactSolution(
        beta=float(beta),
        log_z=spectrum.log_z(beta),
        mean_energy=float(np.sum(p * e)),
        mean_energy_sq=float(np.sum(p * e * e)),
        energies=spectrum.energies,
        p_of_e=p,
    )


def enumerate_exact(h: CouplingHypergraph, d: DisorderRealization, beta: float,
                    with_correlator: bool = False) -> ExactSolution:
    """Exact thermodynamics at ``beta`` by summing over all 2**N_s states."""
    sol = solve(energy_spectrum(h, d), beta)
    if with_correlator:
        from .observables import correlator_per_config
        from .mapping import energy

        states = all_configurations(h.n_spins)
        lw = -beta * energy(h, d, states).astype(np.float64)
        w = np.exp(lw - lw.max())
        g = correlator_per_config(h, states)
        sol = ExactSolution(sol.beta, sol.log_z, sol.mean_energy, sol.mean_energy_sq, sol.energies,
                            sol.p_of_e, (w[:, None] * g).sum(axis=0) / w.sum())
    return sol


def delta_f(h: CouplingHypergraph, d: DisorderRealization, flip_set: Iterable[int], beta: float) -> float:
    """Free-energy cost (1/beta)[ln Z(eta) - ln Z(eta + lambda)] of flipping ``flip_set``."""
    if beta == 0:
        return 0.0
    flipped = flip_couplings(d, flip_set)
    return (energy_spectrum(h, d).log_z(beta) - energy_spectrum(h, flipped).log_z(beta)) / beta


def exact_gsd_count(h: CouplingHypergraph, d: DisorderRealization) -> int:
    counts = energy_spectrum(h, d).counts
    return int(counts[np.flatnonzero(counts)[0]])
