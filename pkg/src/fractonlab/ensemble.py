"""Disorder ensembles: per-realization parallel-tempering runs, jackknife
aggregation over realizations, and checkpoint/resume.

Schedule per realization: 2**tau thermalization sweeps followed by 2**tau
sampling sweeps for every replica, with a replica-exchange pass after every
``swap_cadence`` sweeps. Energies are recorded after every sweep; the
four-spin correlator (checkerboard only) is measured at each exchange boundary
of the sampling phase.
"""

from __future__ import annotations

import dataclasses
import functools
import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .codes import build_code
from .mapping import CouplingHypergraph, map_error_model, sample_disorder
from .mc import DisorderedModel, metropolis_sweep
from .observables import (
    EnergyHistogram,
    LogBinner,
    correlator_per_config,
    equilibration_check,
    xi_second_moment,
)
from .tempering import PTState, TemperatureLadder, build_ladder, init_pt, mixing_report, swap_pass, tune_ladder

FORMAT_BUNDLE = "#fractonlab bundle v1"
FORMAT_CHECKPOINT = "#fractonlab checkpoint v1"
FORMAT_TABLE = "#fractonlab table v1"
N_BLOCKS = 32


class EnsembleError(RuntimeError):
    """Raised when too few realizations pass equilibration to form an average."""


class CheckpointError(ValueError):
    pass


class Interrupted(Exception):
    """A run stopped on request after writing a checkpoint."""


@dataclass(frozen=True)
class EnsembleConfig:
    code: str
    L: int
    p: float
    n_disorder: int
    n_temps: int
    tau: int
    beta_min: float
    beta_max: float
    sector: str = "X"
    swap_cadence: int = 10
    seed: int = 0
    n_micro: int = 1
    ladder_scheme: str = "geometric"
    betas: tuple[float, ...] | None = None
    start: str = "random"
    tune: bool = False
    eq_sigma: float = 1.0  # error-bar multiple for the log-bin agreement test

    def __post_init__(self):
        if self.code not in ("checkerboard", "haah"):
            raise ValueError(f"unknown code {self.code!r}")
        if self.sector not in ("X", "Z"):
            raise ValueError(f"unknown sector {self.sector!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if self.n_disorder < 1 or self.n_temps < 2 or self.tau < 1 or self.swap_cadence < 1:
            raise ValueError("need N_d >= 1, N_T >= 2, tau >= 1, swap_cadence >= 1")
        if not self.eq_sigma > 0:
            raise ValueError("eq_sigma must be positive")
        if self.betas is not None:
            object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
            if len(self.betas) != self.n_temps:
                raise ValueError("explicit ladder length differs from N_T")

    @property
    def sweeps_per_phase(self) -> int:
        return 1 << self.tau

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        if d["betas"] is not None:
            d["betas"] = list(d["betas"])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "EnsembleConfig":
        d = dict(d)
        if d.get("betas") is not None:
            d["betas"] = tuple(d["betas"])
        return cls(**d)

    def fingerprint(self) -> str:
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()[:16]


@functools.lru_cache(maxsize=16)
def _hypergraph(code: str, L: int, sector: str) -> CouplingHypergraph:
    return map_error_model(build_code(code, L), sector)


def config_hypergraph(config: EnsembleConfig) -> CouplingHypergraph:
    return _hypergraph(config.code, config.L, config.sector)


def realization_model(config: EnsembleConfig, index: int) -> DisorderedModel:
    h = config_hypergraph(config)
    return DisorderedModel(h, sample_disorder(h, config.p, config.seed, index))


def resolve_ladder(config: EnsembleConfig) -> TemperatureLadder:
    """Explicit betas if given; otherwise the configured scheme, optionally tuned on
    realization 0 with pilot streams."""
    if config.betas is not None:
        return TemperatureLadder(config.betas)
    ladder = build_ladder(config.beta_min, config.beta_max, config.n_temps, config.ladder_scheme)
    if config.tune:
        ladder = tune_ladder(realization_model(config, 0), ladder, seed=config.seed,
                             sweeps_between_swaps=config.swap_cadence, n_micro=config.n_micro).ladder
    return ladder


# -- per-realization bundle -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SlotRecord:
    beta: float
    histogram: EnergyHistogram
    correlator: np.ndarray | None
    n_correlator: int
    equilibrated: bool
    tau_first: int | None
    mean_error: float = math.nan  # thermal error of <E> from block averages

    def moments(self) -> tuple[float, float]:
        p = self.histogram.probabilities()
        e = self.histogram.energies.astype(np.float64)
        mean = float(np.sum(p * e))
        return mean, float(np.sum(p * (e - mean) ** 2))


@dataclass(frozen=True, eq=False)
class RealizationBundle:
    fingerprint: str
    index: int
    n_spins: int
    n_couplings: int
    slots: tuple[SlotRecord, ...]
    swap_acceptance: np.ndarray
    round_trips: int
    sweeps: int

    @property
    def equilibrated(self) -> bool:
        """Judged on the coldest slot, the slowest to equilibrate."""
        return self.slots[-1].equilibrated

    @property
    def betas(self) -> tuple[float, ...]:
        return tuple(s.beta for s in self.slots)

    def mean_energy(self) -> np.ndarray:
        return np.array([s.moments()[0] for s in self.slots])

    def specific_heat(self) -> np.ndarray:
        return np.array([s.beta**2 * s.moments()[1] / self.n_spins for s in self.slots])

    def susceptibility(self) -> np.ndarray:
        """chi_O = beta N Var(O) with O = -E / N_c."""
        return np.array([s.beta * self.n_spins * s.moments()[1] / self.n_couplings**2 for s in self.slots])

    def to_dict(self) -> dict:
        return {
            "fingerprint": self.fingerprint,
            "index": self.index,
            "n_spins": self.n_spins,
            "n_couplings": self.n_couplings,
            "sweeps": self.sweeps,
            "round_trips": self.round_trips,
            "swap_acceptance": [float(a).hex() for a in self.swap_acceptance],
            "slots": [
                {
                    "beta": s.beta.hex(),
                    "e_min": s.histogram.e_min,
                    "bin_width": s.histogram.bin_width,
                    "counts": s.histogram.counts.tolist(),
                    "correlator": None if s.correlator is None else [float(g).hex() for g in s.correlator],
                    "n_correlator": s.n_correlator,
                    "equilibrated": s.equilibrated,
                    "tau_first": s.tau_first,
                    "mean_error": float(s.mean_error).hex(),
                }
                for s in self.slots
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RealizationBundle":
        slots = tuple(
            SlotRecord(
                float.fromhex(s["beta"]),
                EnergyHistogram(s["e_min"], s["bin_width"], np.array(s["counts"], dtype=np.int64)),
                None if s["correlator"] is None else np.array([float.fromhex(g) for g in s["correlator"]]),
                s["n_correlator"],
                s["equilibrated"],
                s["tau_first"],
                float.fromhex(s["mean_error"]),
            )
            for s in d["slots"]
        )
        return cls(d["fingerprint"], d["index"], d["n_spins"], d["n_couplings"], slots,
                   np.array([float.fromhex(a) for a in d["swap_acceptance"]]), d["round_trips"], d["sweeps"])

    def write(self, path: str | Path) -> None:
        _atomic_write(path, FORMAT_BUNDLE + "\n" + json.dumps(self.to_dict(), sort_keys=True) + "\n")

    @classmethod
    def read(cls, path: str | Path) -> "RealizationBundle":
        return cls.from_dict(_read_tagged(path, FORMAT_BUNDLE))


def _atomic_write(path: str | Path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _read_tagged(path: str | Path, tag: str) -> dict:
    text = Path(path).read_text()
    head, _, body = text.partition("\n")
    if head != tag:
        raise CheckpointError(f"{path}: expected header {tag!r}, found {head!r}")
    return json.loads(body)


# -- a resumable realization run ----------------------------------------------------------


@dataclass(eq=False)
class RealizationRun:
    """Single-realization PT run that can stop at any sweep and be serialized."""

    config: EnsembleConfig
    index: int
    model: DisorderedModel
    pt: PTState
    t: int = 0
    histograms: list = field(default_factory=list)
    binners: list = field(default_factory=list)
    corr_sum: np.ndarray | None = None
    n_corr: int = 0
    block_sums: np.ndarray | None = None  # (N_T, n_blocks) energy sums over sampling blocks

    @classmethod
    def start(cls, config: EnsembleConfig, index: int, ladder: TemperatureLadder | None = None) -> "RealizationRun":
        ladder = ladder or resolve_ladder(config)
        if len(ladder) != config.n_temps:
            raise ValueError("ladder length differs from N_T")
        model = realization_model(config, index)
        pt = init_pt(model, ladder, config.seed, index, start=config.start)
        n = len(ladder)
        corr = np.zeros((n, config.L)) if model.hypergraph.geometry == "checkerboard" else None
        return cls(config, index, model, pt, 0,
                   [EnergyHistogram(0, 2, np.zeros(0, dtype=np.int64)) for _ in range(n)],
                   [LogBinner() for _ in range(n)], corr, 0,
                   np.zeros((n, min(N_BLOCKS, config.sweeps_per_phase)), dtype=np.int64))

    @property
    def total_sweeps(self) -> int:
        return 2 * self.config.sweeps_per_phase

    @property
    def done(self) -> bool:
        return self.t >= self.total_sweeps

    def advance(self, max_sweeps: int | None = None, backend: str | None = None) -> None:
        """Run up to ``max_sweeps`` more sweeps (all remaining if None)."""
        cfg = self.config
        stop = self.total_sweeps if max_sweeps is None else min(self.total_sweeps, self.t + max_sweeps)
        n = len(self.pt.ladder)
        while self.t < stop:
            next_swap = (self.t // cfg.swap_cadence + 1) * cfg.swap_cadence
            boundary = cfg.sweeps_per_phase if self.t < cfg.sweeps_per_phase else self.total_sweeps
            k = min(next_swap, boundary, stop) - self.t
            buf = np.empty((n, k), dtype=np.int64)
            for r, rep in enumerate(self.pt.replicas):
                metropolis_sweep(rep, self.model, k, cfg.n_micro, buf[self.pt.slot_of[r]], backend)
            sampling = self.t >= cfg.sweeps_per_phase
            if sampling:
                block_len = cfg.sweeps_per_phase // self.block_sums.shape[1]
                blocks = (self.t - cfg.sweeps_per_phase + np.arange(k)) // block_len
            self.t += k
            for s in range(n):
                self.binners[s].add(buf[s])
                if sampling:
                    self.histograms[s].add(buf[s])
                    np.add.at(self.block_sums[s], blocks, buf[s])
            if sampling and self.corr_sum is not None and (self.t % cfg.swap_cadence == 0 or self.done):
                at = self.pt.replica_at
                spins = np.stack([self.pt.replicas[r].spins for r in at])
                self.corr_sum += correlator_per_config(self.model.hypergraph, spins)
                self.n_corr += 1
            if self.t % cfg.swap_cadence == 0:
                swap_pass(self.pt)

    def bundle(self) -> RealizationBundle:
        if not self.done:
            raise RuntimeError("realization run has not finished")
        slots = []
        for s, beta in enumerate(self.pt.ladder.betas):
            eq = equilibration_check(self.binners[s], self.config.eq_sigma)
            corr = None if self.corr_sum is None or self.n_corr == 0 else self.corr_sum[s] / self.n_corr
            means = self.block_sums[s] / (self.config.sweeps_per_phase // self.block_sums.shape[1])
            err = float(means.std(ddof=1) / math.sqrt(means.shape[0])) if means.shape[0] > 1 else math.nan
            slots.append(SlotRecord(beta, self.histograms[s].trimmed(), corr, self.n_corr, eq.equilibrated,
                                    eq.tau_first, err))
        rep = mixing_report(self.pt)
        h = self.model.hypergraph
        return RealizationBundle(self.config.fingerprint(), self.index, h.n_spins, h.n_couplings, tuple(slots),
                                 rep.acceptance, int(rep.round_trips.sum()), self.t)

    # checkpointing

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "fingerprint": self.config.fingerprint(),
            "n_spins": self.model.n_spins,
            "index": self.index,
            "t": self.t,
            "pt": self.pt.to_dict(),
            "histograms": [{"e_min": h.e_min, "counts": h.counts.tolist()} for h in self.histograms],
            "binners": [b.to_dict() for b in self.binners],
            "corr_sum": None if self.corr_sum is None else [[float(v).hex() for v in row] for row in self.corr_sum],
            "n_corr": self.n_corr,
            "block_sums": self.block_sums.tolist(),
        }

    def checkpoint(self, path: str | Path) -> None:
        _atomic_write(path, FORMAT_CHECKPOINT + "\n" + json.dumps(self.to_dict(), sort_keys=True) + "\n")

    @classmethod
    def resume(cls, path: str | Path, config: EnsembleConfig | None = None) -> "RealizationRun":
        """Reload a checkpoint; a supplied ``config`` must match the stored one exactly."""
        d = _read_tagged(path, FORMAT_CHECKPOINT)
        stored = EnsembleConfig.from_dict(d["config"])
        if stored.fingerprint() != d["fingerprint"]:
            raise CheckpointError("checkpoint config does not match its fingerprint")
        if config is not None and config.fingerprint() != stored.fingerprint():
            diff = [k for k, v in config.to_dict().items() if d["config"].get(k) != v]
            raise CheckpointError(f"checkpoint belongs to a different run (differs in {', '.join(diff)})")
        model = realization_model(stored, d["index"])
        if model.n_spins != d["n_spins"]:
            raise CheckpointError("geometry mismatch")
        pt = PTState.from_dict(d["pt"], model)
        hists = [EnergyHistogram(h["e_min"], 2, np.array(h["counts"], dtype=np.int64)) for h in d["histograms"]]
        corr = None if d["corr_sum"] is None else np.array([[float.fromhex(v) for v in row] for row in d["corr_sum"]])
        return cls(stored, d["index"], model, pt, d["t"], hists, [LogBinner.from_dict(b) for b in d["binners"]],
                   corr, d["n_corr"], np.array(d["block_sums"], dtype=np.int64))


def run_realization(config: EnsembleConfig, index: int, ladder: TemperatureLadder | None = None,
                    backend: str | None = None) -> RealizationBundle:
    run = RealizationRun.start(config, index, ladder)
    run.advance(backend=backend)
    return run.bundle()


# -- jackknife and aggregation --------------------------------------------------------------


@dataclass(frozen=True)
class JackknifeEstimate:
    value: float
    error: float
    n_samples: int


def _leave_one_out(values: np.ndarray, statistic) -> np.ndarray:
    if statistic == "mean":
        n = values.shape[0]
        return (values.sum(axis=0) - values) / (n - 1)
    if statistic == "ratio":
        if values.ndim != 2 or values.shape[1] != 2:
            raise ValueError("ratio statistic needs (n, 2) values")
        return np.array([np.mean(np.delete(values[:, 0], i)) / np.mean(np.delete(values[:, 1], i))
                         for i in range(values.shape[0])])
    return np.array([statistic(np.delete(values, i, axis=0)) for i in range(values.shape[0])], dtype=np.float64)


def _full(values: np.ndarray, statistic) -> float:
    if statistic == "mean":
        return values.mean(axis=0)
    if statistic == "ratio":
        return np.mean(values[:, 0]) / np.mean(values[:, 1])
    return statistic(values)


def jackknife(values, statistic="mean") -> JackknifeEstimate:
    """Leave-one-out jackknife over the leading axis.

    ``statistic`` is "mean", "ratio" (rows (a, b), estimating mean(a)/mean(b)) or
    a callable reducing an (m, ...) array to a scalar.
    """
    v = np.asarray(values, dtype=np.float64)
    n = v.shape[0]
    if n < 2:
        raise ValueError("jackknife needs at least two values")
    theta = float(_full(v, statistic))
    loo = _leave_one_out(v, statistic)
    m = loo.mean()
    value = n * theta - (n - 1) * m
    error = math.sqrt((n - 1) / n * float(np.sum((loo - m) ** 2)))
    return JackknifeEstimate(float(value), error, n)


@dataclass(frozen=True, eq=False)
class BetaRecord:
    L: int
    p: float
    beta: float
    n_effective: int
    mean_energy: JackknifeEstimate
    specific_heat: JackknifeEstimate
    susceptibility: JackknifeEstimate
    xi: JackknifeEstimate
    hist_energies: np.ndarray
    hist_probabilities: np.ndarray
    correlator: np.ndarray | None


@dataclass(frozen=True, eq=False)
class EnsembleResult:
    config: EnsembleConfig
    records: tuple[BetaRecord, ...]
    n_effective: int
    excluded: tuple[int, ...]
    swap_acceptance: np.ndarray  # (realizations, N_T - 1)
    round_trips: np.ndarray


def _average_histogram(hists: Sequence[EnergyHistogram]) -> tuple[np.ndarray, np.ndarray]:
    lo = min(h.e_min for h in hists)
    hi = max(int(h.energies[-1]) for h in hists)
    energies = np.arange(lo, hi + 1, 2, dtype=np.int64)
    acc = np.zeros(energies.shape[0])
    for h in hists:
        off = (h.e_min - lo) // 2
        acc[off:off + h.counts.shape[0]] += h.probabilities()
    return energies, acc / len(hists)


def _xi_of_mean(g: np.ndarray) -> float:
    return xi_second_moment(g.mean(axis=0))


def aggregate(bundles: Sequence[RealizationBundle], config: EnsembleConfig) -> EnsembleResult:
    """Disorder averages over equilibrated realizations, jackknife errors throughout."""
    if len(bundles) < 2:
        raise ValueError("aggregation needs at least two realizations")
    keep = [b for b in bundles if b.equilibrated]
    excluded = tuple(b.index for b in bundles if not b.equilibrated)
    if len(keep) < 2:
        raise EnsembleError(f"only {len(keep)} of {len(bundles)} realizations passed equilibration")
    betas = keep[0].betas
    if any(b.betas != betas for b in keep):
        raise ValueError("bundles were run on different ladders")
    energy = np.stack([b.mean_energy() for b in keep])
    cv = np.stack([b.specific_heat() for b in keep])
    chi = np.stack([b.susceptibility() for b in keep])
    records = []
    for s, beta in enumerate(betas):
        corr = None
        xi = JackknifeEstimate(math.nan, math.nan, len(keep))
        if keep[0].slots[s].correlator is not None:
            g = np.stack([b.slots[s].correlator for b in keep])
            corr = g.mean(axis=0)
            xi = jackknife(g, _xi_of_mean)
        e, p = _average_histogram([b.slots[s].histogram for b in keep])
        records.append(BetaRecord(config.L, config.p, beta, len(keep), jackknife(energy[:, s]), jackknife(cv[:, s]),
                                  jackknife(chi[:, s]), xi, e, p, corr))
    return EnsembleResult(config, tuple(records), len(keep), excluded,
                          np.stack([b.swap_acceptance for b in bundles]),
                          np.array([b.round_trips for b in bundles]))


# -- whole ensembles -----------------------------------------------------------------------


def _bundle_path(run_dir: Path, index: int) -> Path:
    return run_dir / "bundles" / f"realization_{index:05d}.json"


def _checkpoint_path(run_dir: Path, index: int) -> Path:
    return run_dir / "checkpoints" / f"realization_{index:05d}.ckpt"


def _run_one(config: EnsembleConfig, index: int, betas: tuple[float, ...], run_dir: str | None,
             checkpoint_every: int | None, should_stop: Callable[[], bool] | None) -> RealizationBundle:
    ladder = TemperatureLadder(betas)
    if run_dir is None:
        return run_realization(config, index, ladder)
    rd = Path(run_dir)
    bpath = _bundle_path(rd, index)
    if bpath.exists():
        b = RealizationBundle.read(bpath)
        if b.fingerprint != config.fingerprint():
            raise CheckpointError(f"{bpath} belongs to a different configuration")
        return b
    cpath = _checkpoint_path(rd, index)
    run = RealizationRun.resume(cpath, config) if cpath.exists() else RealizationRun.start(config, index, ladder)
    step = checkpoint_every or run.total_sweeps
    while not run.done:
        run.advance(step)
        if should_stop is not None and should_stop() and not run.done:
            run.checkpoint(cpath)
            raise Interrupted(str(cpath))
        if checkpoint_every and not run.done:
            run.checkpoint(cpath)
    b = run.bundle()
    b.write(bpath)
    if cpath.exists():
        cpath.unlink()
    return b


def run_ensemble(config: EnsembleConfig, run_dir: str | Path | None = None, workers: int = 1,
                 checkpoint_every: int | None = None,
                 should_stop: Callable[[], bool] | None = None) -> EnsembleResult:
    """Run all N_d realizations (in a process pool if ``workers`` > 1) and aggregate.

    With a ``run_dir``, finished bundles are reused and checkpoints resumed, so an
    interrupted ensemble continues where it stopped. Results do not depend on
    ``workers`` or on the order realizations complete in.
    """
    if run_dir is not None:
        rd = Path(run_dir)
        (rd / "bundles").mkdir(parents=True, exist_ok=True)
        (rd / "checkpoints").mkdir(exist_ok=True)
        ladder_file = rd / "ladder.json"
        if ladder_file.exists():
            betas = tuple(float.fromhex(b) for b in _read_tagged(ladder_file, "#fractonlab ladder v1")["betas"])
        else:
            betas = resolve_ladder(config).betas
            _atomic_write(ladder_file, "#fractonlab ladder v1\n" + json.dumps({"betas": [b.hex() for b in betas]}) + "\n")
        run_dir = str(rd)
    else:
        betas = resolve_ladder(config).betas
    indices = range(config.n_disorder)
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            bundles = list(pool.map(_run_one, [config] * len(indices), indices, [betas] * len(indices),
                                    [run_dir] * len(indices), [checkpoint_every] * len(indices),
                                    [None] * len(indices)))
    else:
        bundles = [_run_one(config, i, betas, run_dir, checkpoint_every, should_stop) for i in indices]
    return aggregate(bundles, config)


TABLE_COLUMNS = (
    ("beta", "1/J"), ("E", "J"), ("E_err", "J"), ("C_V", "per spin"), ("C_V_err", "per spin"),
    ("chi_O", "dimensionless"), ("chi_O_err", "dimensionless"), ("xi", "lattice units"),
    ("xi_err", "lattice units"), ("N_d_eff", "count"),
)


def format_table(result: EnsembleResult) -> str:
    cfg = result.config
    lines = [
        FORMAT_TABLE,
        f"# code={cfg.code} sector={cfg.sector} L={cfg.L} p={cfg.p!r} N_d={cfg.n_disorder} "
        f"N_T={cfg.n_temps} tau={cfg.tau} seed={cfg.seed}",
        "# columns: " + "\t".join(f"{name} [{unit}]" for name, unit in TABLE_COLUMNS),
    ]
    for r in result.records:
        vals = [r.beta, r.mean_energy.value, r.mean_energy.error, r.specific_heat.value, r.specific_heat.error,
                r.susceptibility.value, r.susceptibility.error, r.xi.value, r.xi.error]
        lines.append("\t".join(f"{v:.12g}" for v in vals) + f"\t{r.n_effective}")
    return "\n".join(lines) + "\n"


def format_histograms(result: EnsembleResult) -> str:
    lines = [FORMAT_TABLE, "# disorder-averaged energy histograms", "# columns: beta [1/J]\tE [J]\tP(E)"]
    for r in result.records:
        for e, p in zip(r.hist_energies, r.hist_probabilities):
            lines.append(f"{r.beta:.12g}\t{int(e)}\t{p:.12g}")
    return "\n".join(lines) + "\n"


def format_diagnostics(result: EnsembleResult) -> str:
    lines = [FORMAT_TABLE, "# per-realization mixing; excluded (failed equilibration): "
             + (",".join(map(str, result.excluded)) or "none"),
             "# columns: realization\tround_trips\tswap_acceptance (per adjacent pair)"]
    for i, (acc, rt) in enumerate(zip(result.swap_acceptance, result.round_trips)):
        lines.append(f"{i}\t{int(rt)}\t" + ",".join(f"{a:.6g}" for a in acc))
    return "\n".join(lines) + "\n"
