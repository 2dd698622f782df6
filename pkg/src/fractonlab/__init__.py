"""Monte Carlo toolkit for code-capacity thresholds of fracton stabilizer codes.

Stabilizer codes (checkerboard, Haah) are mapped onto disordered multi-spin
Ising hypergraphs, simulated with parallel tempering, and checked against exact
enumeration and entropy-duality predictions.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .codes import build_code, logical_qubit_count, syndrome
from .duality import binary_entropy, dual_threshold, self_dual_point
from .ensemble import EnsembleConfig, aggregate, jackknife, run_ensemble, run_realization
from .exact import delta_f, enumerate_exact, exact_gsd_count
from .kernels import BACKEND
from .mapping import classical_gsd_exponent, map_error_model, nishimori_beta, sample_disorder
from .mc import DisorderedModel, ReplicaState, metropolis_sweep

__all__ = [
    "BACKEND",
    "DisorderedModel",
    "EnsembleConfig",
    "ReplicaState",
    "aggregate",
    "binary_entropy",
    "build_code",
    "classical_gsd_exponent",
    "delta_f",
    "dual_threshold",
    "enumerate_exact",
    "exact_gsd_count",
    "jackknife",
    "logical_qubit_count",
    "map_error_model",
    "metropolis_sweep",
    "nishimori_beta",
    "run_ensemble",
    "run_realization",
    "sample_disorder",
    "self_dual_point",
    "syndrome",
]
