from __future__ import annotations

import json
import os
import signal
import subprocess
import sys
import time
from pathlib import Path

import pytest

from fractonlab.cli import UsageError, main, parse_config
from fractonlab.mapping import read_hypergraph

# a production-scale run, in the config vocabulary
TABLE_ROW = """[run]
code = checkerboard
L = 10
p = 0.105
N_d = 500
N_T = 64
tau = 20
beta_min = 0.2
beta_max = 2.0
seed = 1
"""

SMALL = """[run]
code = checkerboard
L = 2
p = 0.1
N_d = 4
N_T = 4
tau = 9
beta_min = 0.3
beta_max = 1.5
seed = 3
"""


def run_cli(*args, capsys=None):
    code = main([str(a) for a in args])
    out = capsys.readouterr() if capsys else None
    return code, out


def test_parse_table_row():
    c = parse_config(TABLE_ROW)
    assert (c.code, c.L, c.p, c.n_disorder, c.n_temps, c.tau, c.seed) == ("checkerboard", 10, 0.105, 500, 64, 20, 1)


def test_missing_and_unknown_fields_are_named():
    with pytest.raises(UsageError, match="tau"):
        parse_config(TABLE_ROW.replace("tau = 20\n", ""))
    with pytest.raises(UsageError, match="colour"):
        parse_config(TABLE_ROW + "colour = red\n")
    with pytest.raises(UsageError, match="L"):
        parse_config(TABLE_ROW.replace("L = 10", "L = ten"))


@pytest.mark.parametrize("name,L,ns,nc", [("checkerboard", 4, 32, 64), ("haah", 2, 8, 16)])
def test_map(tmp_path, capsys, name, L, ns, nc):
    code, _ = run_cli("map", "--code", name, "--L", L, "--out", tmp_path / "h.txt", capsys=capsys)
    assert code == 0
    h = read_hypergraph(tmp_path / "h.txt")
    assert (h.n_spins, h.n_couplings) == (ns, nc)


def test_map_bad_size_names_constraint(tmp_path, capsys):
    code, out = run_cli("map", "--code", "checkerboard", "--L", 3, "--out", tmp_path / "h.txt", capsys=capsys)
    assert code == 2 and "even L" in out.err


def test_run_is_deterministic_and_manifest_echoes_config(tmp_path, capsys):
    cfg = tmp_path / "c.ini"
    cfg.write_text(SMALL)
    tables = []
    for name in ("a", "b"):
        code, _ = run_cli("run", cfg, "--out", tmp_path / name, "--threads", 1, capsys=capsys)
        assert code == 0
        tables.append((tmp_path / name / "table_L2_p0.1.tsv").read_bytes())
        man = json.loads((tmp_path / name / "manifest.json").read_text())
        assert man["config_text"] == SMALL and man["status"] == "complete"
        assert {o["path"] for o in man["outputs"]} >= {"config.ini", "table_L2_p0.1.tsv"}
    assert tables[0] == tables[1]
    # analyze re-aggregates the stored bundles into the same table
    code, out = run_cli("analyze", tmp_path / "a", capsys=capsys)
    assert code == 0 and out.out.encode() == tables[0]


def test_manifest_echoes_table_row_verbatim(tmp_path):
    from fractonlab.cli import write_manifest

    (tmp_path / "config.ini").write_text(TABLE_ROW)
    write_manifest(tmp_path, TABLE_ROW, parse_config(TABLE_ROW), "start", ["config.ini"], "planned")
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["config_text"] == TABLE_ROW
    assert man["config"]["n_temps"] == 64 and man["config"]["tau"] == 20


def test_run_missing_field_exit_code(tmp_path, capsys):
    cfg = tmp_path / "c.ini"
    cfg.write_text(SMALL.replace("seed = 3\n", ""))
    code, out = run_cli("run", cfg, "--out", tmp_path / "r", capsys=capsys)
    assert code == 2 and "seed" in out.err


def test_resume_without_run(tmp_path, capsys):
    code, _ = run_cli("resume", tmp_path, capsys=capsys)
    assert code == 2


def test_signal_checkpoints_and_resume_matches(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text(SMALL.replace("N_d = 4", "N_d = 30").replace("tau = 9", "tau = 12"))
    env = dict(os.environ, PYTHONUNBUFFERED="1")
    cmd = [sys.executable, "-m", "fractonlab", "run", str(cfg), "--threads", "1", "--checkpoint-every", "256"]
    proc = subprocess.Popen(cmd + ["--out", str(tmp_path / "x")], env=env, stdout=subprocess.PIPE, text=True)
    bundles = tmp_path / "x" / "bundles"
    deadline = time.monotonic() + 60
    while not (bundles.is_dir() and any(bundles.iterdir())) and time.monotonic() < deadline:
        time.sleep(0.05)
    proc.send_signal(signal.SIGINT)
    out, _ = proc.communicate(timeout=120)
    assert proc.returncode == 130, out
    man = json.loads((tmp_path / "x" / "manifest.json").read_text())
    assert man["status"] == "interrupted"
    assert main(["resume", str(tmp_path / "x"), "--threads", "1"]) == 0
    assert main(["run", str(cfg), "--out", str(tmp_path / "y"), "--threads", "1"]) == 0
    name = "table_L2_p0.1.tsv"
    assert (tmp_path / "x" / name).read_bytes() == (tmp_path / "y" / name).read_bytes()


def test_duality_outputs(capsys):
    code, out = run_cli("duality", capsys=capsys)
    assert code == 0
    assert "checkerboard code" in out.out and "VIOLATES" not in out.out and "mismatch" not in out.out
    code, out = run_cli("duality", "--self-dual", capsys=capsys)
    assert "p* = 0.1100278644" in out.out
    code, out = run_cli("duality", "--rate", "0.5", "--records", capsys=capsys)
    assert "H(0.5) = 1.0000000000" in out.out
    assert json.loads(out.out.strip().splitlines()[-1])["H"] == 1.0


def test_duality_table_file(tmp_path, capsys):
    f = tmp_path / "t.txt"
    f.write_text("# name p_x p_z\nmine 0.5 0.5\n")
    code, out = run_cli("duality", "--table", f, capsys=capsys)
    assert code == 0 and "VIOLATES" in out.out
    f.write_text("mine 0.5 1.5\n")
    assert run_cli("duality", "--table", f, capsys=capsys)[0] == 2
    assert run_cli("duality", "--rate", "-0.1", capsys=capsys)[0] == 2


def test_gsd(capsys):
    code, out = run_cli("gsd", "--code", "haah", "--L", 4, capsys=capsys)
    assert code == 0 and "2^7" in out.out and "k = 14" in out.out


def test_oracle_check_and_negative_control(capsys):
    code, out = run_cli("oracle-check", "--sweeps", 100_000, capsys=capsys)
    assert code == 0, out.out
    again = run_cli("oracle-check", "--sweeps", 100_000, capsys=capsys)[1]
    assert again.out == out.out
    code, out = run_cli("oracle-check", "--sweeps", 100_000, "--corrupt-acceptance", capsys=capsys)
    assert code == 4 and "FAIL" in out.out
    assert run_cli("oracle-check", "--spins", 30, capsys=capsys)[0] == 2
