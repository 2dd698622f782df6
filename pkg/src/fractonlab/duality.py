"""Entropy duality on the Nishimori line: binary entropy, dual thresholds,
replicated Boltzmann factors and the CSS threshold-table check."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mapping import nishimori_beta

TOLERANCE = 1e-10


def binary_entropy(p: float) -> float:
    """Shannon entropy in bits; H(0) = H(1) = 0."""
    p = float(p)
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise ValueError(f"rate {p} outside [0, 1]")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


@dataclass(frozen=True)
class EntropyPair:
    p_x: float
    p_z: float
    entropy_sum: float


def entropy_sum(p_x: float, p_z: float) -> EntropyPair:
    return EntropyPair(float(p_x), float(p_z), binary_entropy(p_x) + binary_entropy(p_z))


def _bisect_entropy(target: float, tol: float = TOLERANCE) -> float:
    """The p in [0, 1/2] with H(p) = target, H being increasing there."""
    lo, hi = 0.0, 0.5
    while hi - lo > tol * 1e-3:
        mid = 0.5 * (lo + hi)
        if binary_entropy(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def dual_threshold(p1: float, tol: float = TOLERANCE) -> float:
    """Solve H(p2) = 1 - H(p1) on the branch p2 < 1/2."""
    if not 0.0 < p1 < 0.5:
        raise ValueError(f"need 0 < p1 < 0.5, got {p1}")
    return _bisect_entropy(1.0 - binary_entropy(p1), tol)


def self_dual_point(tol: float = TOLERANCE) -> float:
    """The fixed point p* with H(p*) = 1/2."""
    return _bisect_entropy(0.5, tol)


@dataclass(frozen=True, eq=False)
class ReplicatedFactors:
    n: int
    K: float
    p: float
    x: np.ndarray
    x_star: np.ndarray

    def hierarchy(self) -> np.ndarray:
        """x*_k / x*_0 for k = 0..n."""
        return self.x_star / self.x_star[0]


def replicated_factors(n: int, K: float, p: float) -> ReplicatedFactors:
    """Disorder-averaged replica weights x_k and their Fourier duals x*_k.

    x_k = p u_+^(n-k) u_-^k + (1-p) w_+^(n-k) w_-^k with u_pm = exp(+-K),
    w_pm = exp(-+K), p weighting the u factors; x*_k = 2^(-n/2) (1 - p + (-1)^k p)
    (e^K + e^-K)^(n-k) (e^K - e^-K)^k.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not K > 0:
        raise ValueError("K must be positive")
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    k = np.arange(n + 1)
    u_p, u_m = math.exp(K), math.exp(-K)
    w_p, w_m = u_m, u_p
    x = p * u_p ** (n - k) * u_m**k + (1.0 - p) * w_p ** (n - k) * w_m**k
    c, s = 2.0 * math.cosh(K), 2.0 * math.sinh(K)
    x_star = 2.0 ** (-n / 2.0) * (1.0 - p + (-1.0) ** k * p) * c ** (n - k) * s**k
    return ReplicatedFactors(n, float(K), float(p), x, x_star)


def hierarchy_prediction(n: int, p: float) -> np.ndarray:
    """(1-2p)^k for even k, (1-2p)^(k+1) for odd k."""
    k = np.arange(n + 1)
    return (1.0 - 2.0 * p) ** np.where(k % 2 == 0, k, k + 1)


def nishimori_factors(n: int, p: float) -> ReplicatedFactors:
    return replicated_factors(n, nishimori_beta(p), p)


@dataclass(frozen=True)
class ThresholdEntry:
    code: str
    p_x: float
    p_z: float
    quoted_sum: float | None = None
    uncertainty: float = 0.0


# (code, p_x, p_z, quoted H(p_x)+H(p_z), uncertainty on the quoted sum);
# an unquoted uncertainty is taken as half a unit in the last printed digit.
THRESHOLD_TABLE = (
    ThresholdEntry("2D surface code", 0.1094, 0.1094, 0.9962, 0.0009),
    ThresholdEntry("2D color code", 0.109, 0.109, 0.994, 0.009),
    ThresholdEntry("3D toric code", 0.2327, 0.033, 0.99, 0.02),
    ThresholdEntry("3D color code", 0.276, 0.019, 0.986, 0.0005),
    ThresholdEntry("X-cube code", 0.152, 0.075, 1.00, 0.01),
    ThresholdEntry("checkerboard code", 0.108, 0.108, 0.987, 0.008),
)


@dataclass(frozen=True)
class QGVRow:
    entry: ThresholdEntry
    entropy_sum: float
    matches_quote: bool | None
    violates_bound: bool


def qgv_check(table=THRESHOLD_TABLE) -> list[QGVRow]:
    """Recompute H(p_x) + H(p_z) per row.

    A row violates the bound when the sum exceeds 1 by more than its uncertainty;
    ``matches_quote`` compares against the quoted sum where one is given.
    """
    rows = []
    for e in table:
        s = entropy_sum(e.p_x, e.p_z).entropy_sum
        match = None if e.quoted_sum is None else abs(s - e.quoted_sum) <= e.uncertainty
        rows.append(QGVRow(e, s, match, s > 1.0 + e.uncertainty))
    return rows
