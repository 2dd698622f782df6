"""Measurements and analysis: energy histograms, single-histogram reweighting,
the four-spin correlator with its second-moment correlation length, fluctuation
observables and the logarithmic-binning equilibration test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .mapping import CouplingHypergraph, DisorderRealization, coupling_products

FORMAT_HISTOGRAM = "#fractonlab histogram v1"
FORMAT_CORRELATOR = "#fractonlab correlator v1"


# -- energy histograms ------------------------------------------------------------


@dataclass(eq=False)
class EnergyHistogram:
    """Exact counts on the grid e_min + k * bin_width."""

    e_min: int
    bin_width: int
    counts: np.ndarray

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.bin_width < 1:
            raise ValueError("bin_width must be positive")
        if np.any(self.counts < 0):
            raise ValueError("counts must be non-negative")

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def energies(self) -> np.ndarray:
        return self.e_min + self.bin_width * np.arange(self.counts.shape[0], dtype=np.int64)

    def probabilities(self) -> np.ndarray:
        if self.total == 0:
            raise ValueError("empty histogram")
        return self.counts / self.total

    def as_distribution(self) -> dict[int, float]:
        return {int(e): float(p) for e, p in zip(self.energies, self.probabilities()) if p > 0}

    def add(self, samples) -> None:
        """Accumulate integer energies in place, growing the grid as needed."""
        s = np.asarray(samples, dtype=np.int64).ravel()
        if s.size == 0:
            return
        if np.any((s - self.e_min) % self.bin_width):
            raise ValueError("energy off the histogram grid")
        lo = min(int(s.min()), self.e_min if self.counts.size else int(s.min()))
        if not self.counts.size:
            self.e_min = lo
        if lo < self.e_min:
            pad = (self.e_min - lo) // self.bin_width
            self.counts = np.concatenate([np.zeros(pad, dtype=np.int64), self.counts])
            self.e_min = lo
        idx = (s - self.e_min) // self.bin_width
        need = int(idx.max()) + 1
        if need > self.counts.shape[0]:
            self.counts = np.concatenate([self.counts, np.zeros(need - self.counts.shape[0], dtype=np.int64)])
        self.counts += np.bincount(idx, minlength=self.counts.shape[0])

    def merge(self, other: "EnergyHistogram") -> "EnergyHistogram":
        if other.bin_width != self.bin_width:
            raise ValueError("bin widths differ")
        if other.total == 0:
            return self.copy()
        if self.total == 0:
            return other.copy()
        if (other.e_min - self.e_min) % self.bin_width:
            raise ValueError("histogram grids are not aligned")
        out = self.copy()
        out.add(np.repeat(other.energies, other.counts))
        return out

    def copy(self) -> "EnergyHistogram":
        return EnergyHistogram(self.e_min, self.bin_width, self.counts.copy())

    def trimmed(self) -> "EnergyHistogram":
        nz = np.flatnonzero(self.counts)
        if not nz.size:
            return self.copy()
        return EnergyHistogram(self.e_min + int(nz[0]) * self.bin_width, self.bin_width,
                               self.counts[nz[0]:nz[-1] + 1].copy())

    def __eq__(self, other):
        if not isinstance(other, EnergyHistogram):
            return NotImplemented
        a, b = self.trimmed(), other.trimmed()
        return a.bin_width == b.bin_width and a.e_min == b.e_min and np.array_equal(a.counts, b.counts)

    def write(self, path: str | Path) -> None:
        """Header ``e_min bin_width n_bins total``, then one count per line."""
        lines = [FORMAT_HISTOGRAM, f"{self.e_min} {self.bin_width} {self.counts.shape[0]} {self.total}"]
        lines += [str(int(c)) for c in self.counts]
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def read(cls, path: str | Path) -> "EnergyHistogram":
        lines = Path(path).read_text().splitlines()
        if lines[0] != FORMAT_HISTOGRAM:
            raise ValueError(f"{path}: not a histogram file")
        e_min, width, n, total = map(int, lines[1].split())
        h = cls(e_min, width, np.array([int(v) for v in lines[2:2 + n]], dtype=np.int64))
        if h.total != total:
            raise ValueError(f"{path}: total mismatch")
        return h


def accumulate_histogram(samples, bin_width: int = 2) -> EnergyHistogram:
    s = np.asarray(samples, dtype=np.int64).ravel()
    if s.size == 0:
        return EnergyHistogram(0, bin_width, np.zeros(0, dtype=np.int64))
    h = EnergyHistogram(int(s.min()), bin_width, np.zeros(0, dtype=np.int64))
    h.add(s)
    return h


@dataclass(frozen=True, eq=False)
class ReweightedHistogram:
    e_min: int
    bin_width: int
    probabilities: np.ndarray
    effective_samples: float
    low_statistics: bool

    @property
    def energies(self) -> np.ndarray:
        return self.e_min + self.bin_width * np.arange(self.probabilities.shape[0], dtype=np.int64)

    def as_distribution(self) -> dict[int, float]:
        return {int(e): float(p) for e, p in zip(self.energies, self.probabilities) if p > 0}


def reweight(energies, weights, beta_from: float, beta_to: float) -> np.ndarray:
    """Normalized ``weights(E) * exp(-(beta_to - beta_from) E)``, computed in log space."""
    e = np.asarray(energies, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    with np.errstate(divide="ignore"):
        lw = np.log(w) - (beta_to - beta_from) * e
    lw[w == 0] = -np.inf
    m = lw.max()
    if not np.isfinite(m):
        raise ValueError("nothing to reweight")
    out = np.exp(lw - m)
    return out / out.sum()


def reweight_histogram(h: EnergyHistogram, beta_from: float, beta_to: float,
                       min_effective_samples: float = 100.0) -> ReweightedHistogram:
    """Single-histogram reweighting; flags (does not reject) thin statistics."""
    if h.total == 0:
        raise ValueError("cannot reweight an empty histogram")
    p = reweight(h.energies, h.counts, beta_from, beta_to)
    # per-sample weights are p / counts on occupied bins
    occupied = h.counts > 0
    w = np.zeros_like(p)
    w[occupied] = p[occupied] / h.counts[occupied]
    ess = float(p.sum() ** 2 / np.sum(h.counts * w * w))
    return ReweightedHistogram(h.e_min, h.bin_width, p, ess, ess < min_effective_samples)


def total_variation(a: Mapping[int, float], b: Mapping[int, float]) -> float:
    keys = set(a) | set(b)
    return 0.5 * sum(abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in keys)


# -- correlator and correlation length -------------------------------------------


@dataclass(eq=False)
class CorrelatorProfile:
    g: np.ndarray
    L: int
    err: np.ndarray | None = None
    n_samples: int = 0

    def write(self, path: str | Path) -> None:
        err = self.err if self.err is not None else np.full(self.L, np.nan)
        lines = [FORMAT_CORRELATOR, str(self.L)]
        lines += [f"{r} {float(self.g[r])!r} {float(err[r])!r}" for r in range(self.L)]
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def read(cls, path: str | Path) -> "CorrelatorProfile":
        lines = Path(path).read_text().splitlines()
        if lines[0] != FORMAT_CORRELATOR:
            raise ValueError(f"{path}: not a correlator file")
        L = int(lines[1])
        rows = np.array([[float(v) for v in ln.split()[1:]] for ln in lines[2:2 + L]])
        return cls(rows[:, 0], L, rows[:, 1])


def _grid(h: CouplingHypergraph, configs: np.ndarray) -> np.ndarray:
    L = h.L
    grid = np.ones(configs.shape[:1] + (L, L, L), dtype=np.int8)
    x, y, z = h.spin_positions.T
    grid[:, x, y, z] = configs
    return grid


def correlator_per_config(h: CouplingHypergraph, configs) -> np.ndarray:
    """G(r) of each configuration, shape (n_configs, L).

    For each unit square of the xy-plane at height z, P is the product of the
    two spins on its even-parity diagonal; G(r) averages P(z) P(z + r) over all
    L**3 squares. At odd r this is the four-spin product
    s_v s_{v+x+y} s_{v+y+rz} s_{v+x+rz}; at r = 1 it runs over every tetrahedron
    of the model, and P is invariant under all planar spin flips.
    """
    if h.geometry != "checkerboard" or h.L is None or h.spin_positions is None:
        raise ValueError("the four-spin correlator needs checkerboard geometry")
    c = np.atleast_2d(np.asarray(configs, dtype=np.int8))
    grid = _grid(h, c)
    sq = grid * np.roll(grid, -1, axis=1)
    sq = sq * np.roll(sq, -1, axis=2)
    out = np.empty((c.shape[0], h.L), dtype=np.float64)
    for r in range(h.L):
        out[:, r] = (sq * np.roll(sq, -r, axis=3)).reshape(c.shape[0], -1).mean(axis=1)
    return out


def correlator(configs, h: CouplingHypergraph) -> CorrelatorProfile:
    """Thermal average of G(r) over stored configurations, with naive standard errors."""
    per = correlator_per_config(h, configs)
    n = per.shape[0]
    err = per.std(axis=0, ddof=1) / math.sqrt(n) if n > 1 else np.full(h.L, np.nan)
    return CorrelatorProfile(per.mean(axis=0), h.L, err, n)


def xi_second_moment(g) -> float:
    """Second-moment correlation length along the correlator axis, or nan if undefined.

    xi = sqrt(G(0)/G(k_min) - 1) / (2 sin(k_min / 2)), k_min = 2 pi / L,
    G(k) = sum_r g(r) cos(k r). Undefined when G(k_min) <= 0 or the ratio < 1.
    """
    g = np.asarray(g.g if isinstance(g, CorrelatorProfile) else g, dtype=np.float64)
    L = g.shape[0]
    if L < 2:
        return math.nan
    k = 2.0 * math.pi / L
    r = np.arange(L)
    g0 = float(g.sum())
    gk = float(np.sum(g * np.cos(k * r)))
    if gk <= 1e-12 * float(np.abs(g).sum()) or g0 / gk < 1.0:
        return math.nan
    return math.sqrt(g0 / gk - 1.0) / (2.0 * math.sin(k / 2.0))


# -- fluctuation observables -------------------------------------------------------


def specific_heat(energies, beta: float, n: int) -> float:
    e = np.asarray(energies, dtype=np.float64)
    if e.size < 2:
        raise ValueError("need at least two samples")
    m = e.mean()
    return float(beta * beta * max(np.mean((e - m) ** 2), 0.0) / n)


def susceptibility(values, beta: float, n: int) -> float:
    o = np.asarray(values, dtype=np.float64)
    if o.size < 2:
        raise ValueError("need at least two samples")
    m = o.mean()
    return float(beta * n * max(np.mean((o - m) ** 2), 0.0))


def order_parameter(h: CouplingHypergraph, d: DisorderRealization, spins):
    """(1/N_c) sum_c eta_c prod_{i in c} s_i; the clean subsystem order parameter at p = 0."""
    return (coupling_products(h, spins) * d.eta).mean(axis=-1)


def binning_error(series, min_blocks: int = 32) -> float:
    """Standard error of the mean from blocking; the largest estimate over block sizes."""
    x = np.asarray(series, dtype=np.float64)
    best = 0.0
    while x.shape[0] >= min_blocks:
        best = max(best, float(x.std(ddof=1) / math.sqrt(x.shape[0])))
        x = 0.5 * (x[: x.shape[0] // 2 * 2 : 2] + x[1: x.shape[0] // 2 * 2 : 2])
    return best


# -- logarithmic binning -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BinnedSeries:
    """Bin tau holds times 2**tau .. 2**(tau+1) - 1 (times count from 1)."""

    taus: np.ndarray
    means: np.ndarray
    errors: np.ndarray
    counts: np.ndarray

    @property
    def complete(self) -> np.ndarray:
        return self.counts == (1 << self.taus)


SUB_BLOCKS = 16


@dataclass(eq=False)
class LogBinner:
    """Streaming accumulator for logarithmic bins; O(log T) memory.

    Each bin also keeps SUB_BLOCKS equal sub-block sums, so a complete bin's
    error is a blocked (autocorrelation-aware) standard error. Incomplete bins
    fall back to the naive estimate.
    """

    t: int = 0
    sums: list = field(default_factory=list)
    sumsq: list = field(default_factory=list)
    counts: list = field(default_factory=list)
    blocks: list = field(default_factory=list)

    def add(self, values) -> None:
        v = np.asarray(values, dtype=np.float64).ravel()
        if not v.size:
            return
        times = np.arange(self.t + 1, self.t + 1 + v.size, dtype=np.int64)
        tau = np.frexp(times.astype(np.float64))[1] - 1
        top = int(tau[-1]) + 1
        while len(self.sums) < top:
            self.sums.append(0.0)
            self.sumsq.append(0.0)
            self.counts.append(0)
            self.blocks.append([0.0] * min(SUB_BLOCKS, 1 << (len(self.blocks))))
        s = np.bincount(tau, weights=v, minlength=top)
        q = np.bincount(tau, weights=v * v, minlength=top)
        c = np.bincount(tau, minlength=top)
        sub = (times - (1 << tau)) >> np.maximum(tau - 4, 0)
        b = np.bincount(tau * SUB_BLOCKS + sub, weights=v, minlength=top * SUB_BLOCKS)
        for k in range(int(tau[0]), top):
            self.sums[k] += float(s[k])
            self.sumsq[k] += float(q[k])
            self.counts[k] += int(c[k])
            for j in range(len(self.blocks[k])):
                self.blocks[k][j] += float(b[k * SUB_BLOCKS + j])
        self.t += v.size

    def binned(self) -> BinnedSeries:
        n = np.array(self.counts, dtype=np.int64)
        s = np.array(self.sums)
        q = np.array(self.sumsq)
        with np.errstate(invalid="ignore", divide="ignore"):
            mean = s / n
            var = np.maximum(q / n - mean * mean, 0.0) * n / (n - 1)
            err = np.where(n > 1, np.sqrt(var / n), np.nan)
        for k, blk in enumerate(self.blocks):
            if len(blk) > 1 and n[k] == 1 << k:
                m = np.array(blk) / (n[k] // len(blk))
                err[k] = m.std(ddof=1) / math.sqrt(len(blk))
        return BinnedSeries(np.arange(n.shape[0]), mean, err, n)

    def to_dict(self) -> dict:
        return {"t": self.t, "sums": [float(x).hex() for x in self.sums],
                "sumsq": [float(x).hex() for x in self.sumsq], "counts": list(self.counts),
                "blocks": [[float(x).hex() for x in blk] for blk in self.blocks]}

    @classmethod
    def from_dict(cls, d: dict) -> "LogBinner":
        return cls(d["t"], [float.fromhex(x) for x in d["sums"]], [float.fromhex(x) for x in d["sumsq"]],
                   list(d["counts"]), [[float.fromhex(x) for x in blk] for blk in d["blocks"]])


def log_bin(series) -> BinnedSeries:
    b = LogBinner()
    b.add(series)
    return b.binned()


@dataclass(frozen=True)
class EquilibrationResult:
    equilibrated: bool
    tau_first: int | None
    diagnostic: str = ""


def _agree(binned: BinnedSeries, end: int, n_sigma: float) -> bool:
    idx = (end - 2, end - 1, end)
    for i in range(3):
        for j in range(i + 1, 3):
            a, b = idx[i], idx[j]
            if abs(binned.means[a] - binned.means[b]) > n_sigma * (binned.errors[a] + binned.errors[b]):
                return False
    return True


def equilibration_check(series, n_sigma: float = 1.0) -> EquilibrationResult:
    """Log-binned equilibration test.

    Equilibrated iff the means of the last three complete bins agree pairwise
    within their error bars (|m_a - m_b| <= n_sigma (e_a + e_b)). ``tau_first`` is
    the earliest bin from which every later triple of consecutive complete bins
    agrees. Accepts a raw series or a ``LogBinner``.
    """
    binned = series.binned() if isinstance(series, LogBinner) else log_bin(series)
    length = int(binned.counts.sum())
    if length < 8:
        return EquilibrationResult(False, None, f"series too short ({length} < 8)")
    usable = [int(t) for t in binned.taus if binned.complete[t] and binned.counts[t] >= 2]
    if len(usable) < 3:
        return EquilibrationResult(False, None, "fewer than three complete bins with two or more samples")
    last = usable[-1]
    if not _agree(binned, last, n_sigma):
        return EquilibrationResult(False, None, f"bins {last - 2}..{last} disagree")
    first = last
    while first - 1 >= usable[0] + 2 and _agree(binned, first - 1, n_sigma):
        first -= 1
    return EquilibrationResult(True, first, "")
