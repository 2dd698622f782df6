"""Monte Carlo versus exact-enumeration comparisons on a small random hypergraph."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exact import MAX_SPINS, OracleSizeError, energy_spectrum, solve
from .mapping import CouplingHypergraph, DisorderRealization, nishimori_beta, random_hypergraph, sample_disorder
from .mc import DisorderedModel, ReplicaState, metropolis_sweep
from .observables import accumulate_histogram, binning_error, reweight, reweight_histogram, total_variation
from .rng import Stream
from .tempering import TemperatureLadder, init_pt, pt_step


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tolerance: float
    passed: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: {self.value:.6g} (tolerance {self.tolerance:g})"


def oracle_instance(n_spins: int = 12, n_couplings: int = 12, arity: int = 4, p: float = 0.2,
                    seed: int = 0) -> tuple[CouplingHypergraph, DisorderRealization]:
    if n_spins > MAX_SPINS:
        raise OracleSizeError(f"{n_spins} spins exceeds the enumeration cap of {MAX_SPINS}")
    h = random_hypergraph(n_spins, n_couplings, arity, seed)
    return h, sample_disorder(h, p, seed)


def sample_energies(model: DisorderedModel, beta: float, n_sweeps: int, seed: int, burn_in: int = 1000,
                    rule: str = "metropolis", backend: str | None = None) -> np.ndarray:
    """Energy after each of ``n_sweeps`` Metropolis sweeps following a burn-in."""
    state = ReplicaState.new(model, beta, Stream.from_parts(seed, 0, 7), rule=rule)
    metropolis_sweep(state, model, burn_in, backend=backend)
    out = np.empty(n_sweeps, dtype=np.int64)
    metropolis_sweep(state, model, n_sweeps, record=out, backend=backend)
    return out


def _tv_exact(energies: np.ndarray, exact_dist: dict[int, float]) -> float:
    return total_variation(accumulate_histogram(energies).as_distribution(), exact_dist)


def metropolis_checks(h, d, betas, n_sweeps: int, seed: int, rule: str = "metropolis",
                      tv_tol: float = 0.02, n_sigma: float = 3.0) -> list[CheckResult]:
    model = DisorderedModel(h, d)
    spec = energy_spectrum(h, d)
    out = []
    for k, beta in enumerate(betas):
        exact = solve(spec, beta)
        e = sample_energies(model, beta, n_sweeps, seed + k, rule=rule)
        tv = _tv_exact(e, exact.distribution())
        out.append(CheckResult(f"metropolis P(E) TV at beta={beta:.4f}", tv, tv_tol, tv <= tv_tol))
        z = float(abs(e.mean() - exact.mean_energy) / max(binning_error(e), 1e-300))
        out.append(CheckResult(f"metropolis <E> deviation in sigma at beta={beta:.4f}", z, n_sigma, z <= n_sigma))
    return out


def pt_checks(h, d, betas, n_steps: int, seed: int, sweeps_between_swaps: int = 10, rule: str = "metropolis",
              tv_tol: float = 0.02, burn_steps: int = 100) -> list[CheckResult]:
    model = DisorderedModel(h, d)
    spec = energy_spectrum(h, d)
    ladder = TemperatureLadder(tuple(betas))
    state = init_pt(model, ladder, seed, start="random", rule=rule)
    n = len(ladder)
    for _ in range(burn_steps):
        pt_step(state, model, sweeps_between_swaps, n_micro=0)
    rec = np.empty((n, n_steps * sweeps_between_swaps), dtype=np.int64)
    buf = np.empty((n, sweeps_between_swaps), dtype=np.int64)
    for s in range(n_steps):
        pt_step(state, model, sweeps_between_swaps, n_micro=0, out=buf)
        rec[:, s * sweeps_between_swaps:(s + 1) * sweeps_between_swaps] = buf
    out = []
    for slot, beta in enumerate(ladder.betas):
        tv = _tv_exact(rec[slot], solve(spec, beta).distribution())
        out.append(CheckResult(f"PT slot {slot} P(E) TV at beta={beta:.4f}", tv, tv_tol, tv <= tv_tol))
    return out


def reweighting_checks(h, d, beta: float, shifts=(-0.05, 0.05), n_sweeps: int = 200_000, seed: int = 0,
                       rule: str = "metropolis", tv_tol: float = 0.03, exact_tol: float = 1e-10) -> list[CheckResult]:
    model = DisorderedModel(h, d)
    spec = energy_spectrum(h, d)
    out = []
    base = sample_energies(model, beta, n_sweeps, seed, rule=rule)
    hist = accumulate_histogram(base)
    for k, dbeta in enumerate(shifts):
        target = beta + dbeta
        closure = np.abs(reweight(spec.energies, solve(spec, beta).p_of_e, beta, target) - solve(spec, target).p_of_e).max()
        out.append(CheckResult(f"exact reweighting closure {beta:.3f}->{target:.3f}", float(closure), exact_tol,
                               closure <= exact_tol))
        rw = reweight_histogram(hist, beta, target).as_distribution()
        direct = accumulate_histogram(sample_energies(model, target, n_sweeps, seed + 1 + k, rule=rule))
        tv = total_variation(rw, direct.as_distribution())
        out.append(CheckResult(f"MC reweighting {beta:.3f}->{target:.3f} TV vs direct", tv, tv_tol, tv <= tv_tol))
    return out


def default_suite(seed: int = 0, n_sweeps: int = 200_000, rule: str = "metropolis", n_spins: int = 12,
                  n_couplings: int = 12, arity: int = 4, p: float = 0.2) -> list[CheckResult]:
    h, d = oracle_instance(n_spins, n_couplings, arity, p, seed)
    betas = (0.3, nishimori_beta(0.11), 1.5)
    results = metropolis_checks(h, d, betas, n_sweeps, seed, rule)
    results += pt_checks(h, d, (0.3, 0.6, 1.0, 1.5), max(n_sweeps // 10, 1000), seed, rule=rule)
    results += reweighting_checks(h, d, 0.8, n_sweeps=n_sweeps, seed=seed, rule=rule)
    return results


def all_passed(results) -> bool:
    return all(r.passed for r in results) and not any(math.isnan(r.value) for r in results)
