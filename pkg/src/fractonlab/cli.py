"""Command-line front end.

Subcommands: map, run, resume, analyze, duality, gsd, oracle-check.
Exit codes: 0 success, 2 usage error, 3 equilibration quorum not met,
4 internal invariant breach (including a failed oracle check), 130 interrupted
after writing a checkpoint.
"""

from __future__ import annotations

import argparse
import configparser
import datetime as _dt
import hashlib
import json
import os
import signal
import sys
from pathlib import Path

from . import __version__
from .codes import CodeConstraintError, build_code, logical_qubit_count
from .duality import THRESHOLD_TABLE, ThresholdEntry, binary_entropy, dual_threshold, qgv_check, self_dual_point
from .ensemble import (
    CheckpointError,
    EnsembleConfig,
    EnsembleError,
    Interrupted,
    RealizationBundle,
    aggregate,
    format_diagnostics,
    format_histograms,
    format_table,
    run_ensemble,
)
from .exact import MAX_SPINS, OracleSizeError
from .mapping import classical_gsd_exponent, map_error_model, write_hypergraph
from .validation import all_passed, default_suite

EXIT_OK, EXIT_USAGE, EXIT_QUORUM, EXIT_INVARIANT, EXIT_INTERRUPTED = 0, 2, 3, 4, 130
OUTPUT_ENV = "FRACTONLAB_OUTPUT"
CONFIG_SECTION = "run"
MANIFEST_VERSION = 1

# key in the config file -> (EnsembleConfig field, parser)
_REQUIRED = {
    "code": ("code", str),
    "L": ("L", int),
    "p": ("p", float),
    "N_d": ("n_disorder", int),
    "N_T": ("n_temps", int),
    "tau": ("tau", int),
    "beta_min": ("beta_min", float),
    "beta_max": ("beta_max", float),
    "seed": ("seed", int),
}
_OPTIONAL = {
    "sector": ("sector", str),
    "swap_cadence": ("swap_cadence", int),
    "n_micro": ("n_micro", int),
    "ladder": ("ladder_scheme", str),
    "start": ("start", str),
    "eq_sigma": ("eq_sigma", float),
    "tune": ("tune", lambda v: v.strip().lower() in ("1", "true", "yes", "on")),
    "betas": ("betas", lambda v: tuple(float(x) for x in v.replace(",", " ").split())),
}


class UsageError(Exception):
    pass


def parse_config(text: str) -> EnsembleConfig:
    """Parse the ``[run]`` section of an INI-style config into an ``EnsembleConfig``."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise UsageError(f"malformed config: {exc}") from None
    if CONFIG_SECTION not in cp:
        raise UsageError(f"config needs a [{CONFIG_SECTION}] section")
    sec = cp[CONFIG_SECTION]
    missing = [k for k in _REQUIRED if k not in sec]
    if missing:
        raise UsageError("config is missing required field(s): " + ", ".join(missing))
    unknown = [k for k in sec if k not in _REQUIRED and k not in _OPTIONAL]
    if unknown:
        raise UsageError("unknown config field(s): " + ", ".join(unknown))
    kwargs = {}
    for key, (name, conv) in {**_REQUIRED, **_OPTIONAL}.items():
        if key in sec:
            try:
                kwargs[name] = conv(sec[key])
            except ValueError:
                raise UsageError(f"config field {key} has an invalid value {sec[key]!r}") from None
    try:
        return EnsembleConfig(**kwargs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _source_hash() -> str:
    h = hashlib.sha256()
    root = Path(__file__).parent
    for f in sorted(root.glob("*.py")) + sorted(root.glob("*.pyx")):
        h.update(f.name.encode())
        h.update(f.read_bytes())
    return h.hexdigest()


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def write_manifest(run_dir: Path, config_text: str, config: EnsembleConfig, started: str, outputs: list[str],
                   status: str) -> None:
    manifest = {
        "format": "fractonlab manifest",
        "version": MANIFEST_VERSION,
        "fractonlab_version": __version__,
        "status": status,
        "config_text": config_text,
        "config": config.to_dict(),
        "config_fingerprint": config.fingerprint(),
        "inputs_hash": hashlib.sha256((config_text + _source_hash()).encode()).hexdigest(),
        "code_hash": _source_hash(),
        "started": started,
        "finished": _now(),
        "outputs": [{"path": p, "sha256": _sha256(run_dir / p)} for p in sorted(outputs)],
    }
    _atomic_write(run_dir / "manifest.json", json.dumps(manifest, indent=2) + "\n")


def _default_run_dir(config: EnsembleConfig) -> Path:
    root = Path(os.environ.get(OUTPUT_ENV, "runs"))
    return root / f"{config.code}_L{config.L}_p{config.p:g}_{config.fingerprint()}"


def _output_stem(config: EnsembleConfig) -> str:
    return f"L{config.L}_p{config.p:g}"


def _emit_outputs(run_dir: Path, result) -> list[str]:
    stem = _output_stem(result.config)
    files = {
        f"table_{stem}.tsv": format_table(result),
        f"histograms_{stem}.tsv": format_histograms(result),
        f"diagnostics_{stem}.tsv": format_diagnostics(result),
    }
    for name, text in files.items():
        _atomic_write(run_dir / name, text)
    return ["config.ini", *files]


class _StopFlag:
    def __init__(self):
        self.raised = False

    def __call__(self) -> bool:
        return self.raised

    def install(self) -> dict:
        def handler(signum, frame):
            self.raised = True

        return {sig: signal.signal(sig, handler) for sig in (signal.SIGINT, signal.SIGTERM)}

    @staticmethod
    def restore(previous: dict) -> None:
        for sig, h in previous.items():
            signal.signal(sig, h)


def _execute(run_dir: Path, config_text: str, config: EnsembleConfig, threads: int, checkpoint_every: int | None,
             out=sys.stdout) -> int:
    run_dir.mkdir(parents=True, exist_ok=True)
    cfg_path = run_dir / "config.ini"
    if cfg_path.exists() and cfg_path.read_text() != config_text:
        raise UsageError(f"{run_dir} already holds a run with a different config")
    _atomic_write(cfg_path, config_text)
    started = _now()
    stop = _StopFlag()
    previous = stop.install()
    try:
        result = run_ensemble(config, run_dir, workers=threads, checkpoint_every=checkpoint_every,
                              should_stop=stop if threads <= 1 else None)
    except Interrupted as exc:
        write_manifest(run_dir, config_text, config, started, ["config.ini"], "interrupted")
        print(f"interrupted; checkpoint written to {exc}", file=out)
        return EXIT_INTERRUPTED
    except EnsembleError as exc:
        write_manifest(run_dir, config_text, config, started, ["config.ini"], "quorum-failed")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_QUORUM
    finally:
        stop.restore(previous)
    outputs = _emit_outputs(run_dir, result)
    write_manifest(run_dir, config_text, config, started, outputs, "complete")
    print(f"run complete: {run_dir} (N_d_effective = {result.n_effective} of {config.n_disorder})", file=out)
    return EXIT_OK


# -- subcommands ------------------------------------------------------------------------


def cmd_map(args) -> int:
    try:
        code = build_code(args.code, args.L)
    except CodeConstraintError as exc:
        raise UsageError(str(exc)) from None
    h = map_error_model(code, args.sector)
    write_hypergraph(h, args.out)
    print(f"wrote {args.out}: {h.n_spins} spins, {h.n_couplings} couplings")
    return EXIT_OK


def cmd_run(args) -> int:
    text = Path(args.config).read_text()
    config = parse_config(text)
    run_dir = Path(args.out) if args.out else _default_run_dir(config)
    return _execute(run_dir, text, config, args.threads, args.checkpoint_every)


def cmd_resume(args) -> int:
    run_dir = Path(args.run_dir)
    cfg_path = run_dir / "config.ini"
    if not cfg_path.exists():
        raise UsageError(f"{run_dir} holds no config.ini; nothing to resume")
    text = cfg_path.read_text()
    return _execute(run_dir, text, parse_config(text), args.threads, args.checkpoint_every)


def cmd_analyze(args) -> int:
    run_dir = Path(args.run_dir)
    cfg_path = run_dir / "config.ini"
    if not cfg_path.exists():
        raise UsageError(f"{run_dir} holds no config.ini")
    text = cfg_path.read_text()
    config = parse_config(text)
    paths = sorted((run_dir / "bundles").glob("realization_*.json"))
    bundles = [RealizationBundle.read(p) for p in paths]
    if any(b.fingerprint != config.fingerprint() for b in bundles):
        raise UsageError("bundles do not match the run config")
    if len(bundles) < 2:
        raise UsageError(f"need at least two finished realizations, found {len(bundles)}")
    try:
        result = aggregate(bundles, config)
    except EnsembleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_QUORUM
    outputs = _emit_outputs(run_dir, result)
    write_manifest(run_dir, text, config, _now(), outputs,
                   "complete" if len(bundles) == config.n_disorder else "partial")
    sys.stdout.write(format_table(result))
    return EXIT_OK


def _read_threshold_table(path: str) -> list[ThresholdEntry]:
    rows = []
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [s.strip() for s in line.split("\t")] if "\t" in line else line.split()
        try:
            name, px, pz = parts[0], float(parts[1]), float(parts[2])
            quoted = float(parts[3]) if len(parts) > 3 else None
            unc = float(parts[4]) if len(parts) > 4 else 0.0
        except (IndexError, ValueError):
            raise UsageError(f"{path}:{n}: expected 'name p_x p_z [sum [uncertainty]]'") from None
        for r in (px, pz):
            if not 0.0 <= r <= 1.0:
                raise UsageError(f"{path}:{n}: rate {r} outside [0, 1]")
        rows.append(ThresholdEntry(name, px, pz, quoted, unc))
    return rows


def cmd_duality(args) -> int:
    records = []
    lines = []
    if args.rate is not None:
        for p in args.rate:
            if not 0.0 <= p <= 1.0:
                raise UsageError(f"rate {p} outside [0, 1]")
            rec = {"kind": "entropy", "p": p, "H": binary_entropy(p)}
            line = f"H({p:g}) = {rec['H']:.10f}"
            if 0.0 < p < 0.5:
                rec["dual"] = dual_threshold(p)
                line += f"   dual threshold = {rec['dual']:.10f}"
            records.append(rec)
            lines.append(line)
    if args.self_dual:
        p_star = self_dual_point()
        records.append({"kind": "self_dual", "p_star": p_star})
        lines.append(f"self-dual point p* = {p_star:.10f}")
    if args.table or (args.rate is None and not args.self_dual):
        table = _read_threshold_table(args.table) if args.table else THRESHOLD_TABLE
        rows = qgv_check(table)
        width = max([len(r.entry.code) for r in rows] + [4])
        lines.append(f"{'code':<{width}}  {'p_x':>8}  {'p_z':>8}  {'H+H':>8}  {'quoted':>12}  status")
        for r in rows:
            q = "" if r.entry.quoted_sum is None else f"{r.entry.quoted_sum:g}({r.entry.uncertainty:g})"
            status = "VIOLATES" if r.violates_bound else ("ok" if r.matches_quote in (None, True) else "mismatch")
            lines.append(f"{r.entry.code:<{width}}  {r.entry.p_x:>8g}  {r.entry.p_z:>8g}  {r.entropy_sum:>8.5f}  "
                         f"{q:>12}  {status}")
            records.append({"kind": "qgv", "code": r.entry.code, "p_x": r.entry.p_x, "p_z": r.entry.p_z,
                            "entropy_sum": r.entropy_sum, "matches_quote": r.matches_quote,
                            "violates_bound": r.violates_bound})
    print("\n".join(lines))
    if args.records:
        for rec in records:
            print(json.dumps(rec, sort_keys=True))
    return EXIT_OK


def cmd_gsd(args) -> int:
    try:
        code = build_code(args.code, args.L)
    except CodeConstraintError as exc:
        raise UsageError(str(exc)) from None
    h = map_error_model(code, args.sector)
    g = classical_gsd_exponent(h)
    k = logical_qubit_count(code)
    print(f"{args.code} L={args.L} sector={args.sector}: spins={h.n_spins} couplings={h.n_couplings} "
          f"classical GSD = 2^{g}, logical qubits k = {k}")
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    if args.spins > MAX_SPINS:
        raise UsageError(f"{args.spins} spins exceeds the enumeration cap of {MAX_SPINS}")
    rule = "corrupted" if args.corrupt_acceptance else "metropolis"
    try:
        results = default_suite(seed=args.seed, n_sweeps=args.sweeps, rule=rule, n_spins=args.spins,
                                n_couplings=args.couplings, arity=args.arity, p=args.p)
    except (OracleSizeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    for r in results:
        print(r.line())
    ok = all_passed(results)
    print("oracle check: " + ("PASS" if ok else "FAIL"))
    return EXIT_OK if ok else EXIT_INVARIANT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fractonlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"fractonlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("map", help="write the Ising hypergraph of a code")
    p.add_argument("--code", required=True, choices=["checkerboard", "haah"])
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--sector", default="X", choices=["X", "Z"])
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_map)

    for name, func, helptext in (("run", cmd_run, "run a disorder ensemble from a config file"),
                                 ("resume", cmd_resume, "continue an interrupted run directory")):
        p = sub.add_parser(name, help=helptext)
        if name == "run":
            p.add_argument("config")
            p.add_argument("--out", help=f"run directory (default: ${OUTPUT_ENV} or ./runs)")
        else:
            p.add_argument("run_dir")
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
        p.add_argument("--checkpoint-every", type=int, default=None, metavar="SWEEPS")
        p.set_defaults(func=func)

    p = sub.add_parser("analyze", help="re-aggregate the bundles of a run directory")
    p.add_argument("run_dir")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("duality", help="entropy sums, dual thresholds and the self-dual point")
    p.add_argument("--table", help="threshold table file: name p_x p_z [sum [uncertainty]] per line")
    p.add_argument("--rate", type=float, nargs="+")
    p.add_argument("--self-dual", action="store_true")
    p.add_argument("--records", action="store_true", help="also print one JSON record per result")
    p.set_defaults(func=cmd_duality)

    p = sub.add_parser("gsd", help="ground-state degeneracy exponent and logical qubit count")
    p.add_argument("--code", required=True, choices=["checkerboard", "haah"])
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--sector", default="X", choices=["X", "Z"])
    p.set_defaults(func=cmd_gsd)

    p = sub.add_parser("oracle-check", help="Monte Carlo against exact enumeration on a small instance")
    p.add_argument("--spins", type=int, default=12)
    p.add_argument("--couplings", type=int, default=12)
    p.add_argument("--arity", type=int, default=4)
    p.add_argument("--p", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sweeps", type=int, default=200_000)
    p.add_argument("--corrupt-acceptance", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CheckpointError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (AssertionError, RuntimeError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
