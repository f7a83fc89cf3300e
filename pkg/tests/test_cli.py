import csv
import subprocess
import sys

import numpy as np
import pytest

from actcomp import codecs
from actcomp.cli import run
from actcomp.metrics import reconstruction_error
from actcomp.netsim import format_config, SimConfig
from actcomp.tensor import SynthSpec, generate_synthetic, load_activation


def _pipeline(d, codec="fourier", mode="corner"):
    a, c, r = d / "a.actv", d / "c.fcmp", d / "r.actv"
    assert run(["gen", "--rows", "64", "--cols", "64", "--seed", "42", "--out", str(a)]) == 0
    assert run(["compress", "--codec", codec, "--ratio", "8", "--mode", mode, "--in", str(a), "--out", str(c)]) == 0
    assert run(["decompress", "--in", str(c), "--out", str(r)]) == 0
    return a, c, r


@pytest.mark.parametrize("codec", codecs.CODECS)
def test_pipeline_matches_library(tmp_path, capsys, codec):
    a, c, r = _pipeline(tmp_path, codec)
    A = generate_synthetic(64, 64, SynthSpec(8, 2.0, 0.01, 42))
    assert load_activation(a) == A
    B = codecs.decompress(codecs.compress(A, codec, 8))
    assert load_activation(r) == B
    capsys.readouterr()
    assert run(["metrics", "--ref", str(a), "--test", str(r)]) == 0
    assert capsys.readouterr().out.strip() == f"rel_error={reconstruction_error(A, B):.9g}"


def test_pipeline_bit_identical(tmp_path):
    (tmp_path / "1").mkdir()
    (tmp_path / "2").mkdir()
    first = [p.read_bytes() for p in _pipeline(tmp_path / "1", mode="centered")]
    second = [p.read_bytes() for p in _pipeline(tmp_path / "2", mode="centered")]
    assert first == second


def test_usage_errors(tmp_path, capsys):
    assert run(["compress", "--ratio", "0.5", "--in", "x", "--out", "y"]) == 1
    assert "r > 1" in capsys.readouterr().err
    assert run(["gen", "--rows", "4"]) == 1
    assert run(["gen", "--rows", "4", "--cols", "4", "--out", "x", "--bogus"]) == 1
    assert run([]) == 1
    assert run(["sweep", "--codecs", "zip"]) == 1


def test_data_errors(tmp_path, capsys):
    assert run(["decompress", "--in", str(tmp_path / "missing"), "--out", str(tmp_path / "o")]) == 2
    bad = tmp_path / "bad.actv"
    bad.write_bytes(b"NOPE" + bytes(12))
    assert run(["analyze", "--in", str(bad)]) == 2
    assert "error" in capsys.readouterr().err


def test_sweep_synthetic(tmp_path):
    out = tmp_path / "s.csv"
    assert run(["sweep", "--ratios", "6,8,10", "--seeds", "0,1", "--out", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert len(rows) == 13
    assert {r[0] for r in rows[1:]} == set(codecs.CODECS)


def test_sweep_from_file(tmp_path):
    a, _, _ = _pipeline(tmp_path)
    out = tmp_path / "s.csv"
    assert run(["sweep", "--in", str(a), "--codecs", "fourier,svd", "--ratios", "4", "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 3


def test_analyze(tmp_path, capsys):
    a, _, _ = _pipeline(tmp_path)
    capsys.readouterr()
    assert run(["analyze", "--in", str(a), "--profile-steps", "4", "--similarity"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "block_fraction,energy_fraction"
    assert len(lines) == 6
    assert float(lines[4].split(",")[1]) == pytest.approx(1.0)
    assert lines[5].startswith("token_similarity=")


def test_simulate(tmp_path):
    conf = tmp_path / "sim.conf"
    conf.write_text(format_config(SimConfig(n_clients=5, request_rate=2.0, sim_duration=20, seed=3)))
    out = tmp_path / "o.csv"
    assert run(["simulate", "--config", str(conf), "--out", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["n_clients", "link_gbps", "ratio", "mean_s", "p95_s", "utilization"]
    assert rows[1][0] == "5" and float(rows[1][3]) > 0
    conf.write_text("nonsense = 1\n")
    assert run(["simulate", "--config", str(conf)]) == 2


def test_bench(tmp_path):
    out = tmp_path / "b.csv"
    assert run(["bench", "--sizes", "1x1,16x8", "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 1 + 2 * len(codecs.CODECS)
    assert run(["bench", "--sizes", "16by8"]) == 1


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "actcomp", "compress", "--ratio", "1"], capture_output=True, text=True)
    assert proc.returncode == 1
