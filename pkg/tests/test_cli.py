from __future__ import annotations

import json
import subprocess
import sys

import pytest

from hispin.cli import RunConfig, build_parser, main, parse_config, resolve_config


def test_verify_writes_report_and_exits_zero(tmp_path, capsys):
    out = tmp_path / "r.json"
    code = main(["verify", "--suite", "clifford,fundsol", "--m", "3", "--k", "1", "--workers", "1",
                 "--output", str(out), "--quiet"])
    assert code == 0
    data = json.loads(out.read_text())
    assert data["grid"]["m"] == [3] and data["grid"]["k"] == [1]
    assert {c["suite"] for c in data["checks"]} == {"clifford", "fundsol"}


def test_lemmas3_at_guarded_point(tmp_path, capsys):
    out = tmp_path / "r.json"
    code = main(["verify", "--suite", "lemmas3", "--m", "4", "--k", "1", "--workers", "1", "--output", str(out)])
    assert code == 0
    skips = [c for c in json.loads(out.read_text())["checks"] if c["status"] == "skip"]
    assert skips and all("m+6k-10" in c["reason"] for c in skips)
    assert "m+6k-10" in capsys.readouterr().err


def test_env_var_sets_report_directory(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("HISPIN_REPORT_DIR", str(tmp_path))
    assert main(["verify", "--suite", "clifford_anticommutation", "--m", "3", "--k", "0", "--quiet"]) == 0
    assert (tmp_path / "hispin-report.json").exists()


def test_report_to_stdout(capsys):
    assert main(["verify", "--suite", "clifford_anticommutation", "--m", "3", "--k", "0", "--output", "-",
                 "--quiet", "--no-timings"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["checks"][0]["name"] == "clifford_anticommutation"


@pytest.mark.parametrize("argv", [
    ["verify", "--suite", "nope"],
    ["verify", "--m", "2"],
    ["verify", "--k", "-1"],
    ["verify", "--mode", "symbolic"],
    ["verify", "--output", "/nonexistent/dir/r.json"],
    ["render-op", "nope", "--m", "3", "--k", "1"],
    ["spaces", "--m", "1", "--k", "0"],
])
def test_config_errors_exit_two(argv, capsys):
    assert main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_operator_guard_exits_two(capsys):
    assert main(["render-op", "D3", "--m", "4", "--k", "1"]) == 2
    assert "m+6k-10" in capsys.readouterr().err


def test_config_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep\nm = 3, 5\nk = 2\nseed = 9\nmode = float\n")
    args = build_parser().parse_args(["verify", "--config", str(cfg), "--k", "1"])
    rc = resolve_config(args)
    assert rc.m == [3, 5]
    assert rc.k == [1]
    assert rc.seed == 9
    assert rc.mode == "float"
    defaults = resolve_config(build_parser().parse_args(["verify"]))
    assert defaults.m == [3, 4, 5] and defaults.k == [0, 1, 2] and defaults.mode == "exact"
    assert defaults.suite == ["all"] and defaults.xdeg is None


def test_config_round_trip():
    rc = RunConfig(m=[3, 4], k=[1], xdeg=2, suite=["lemmas3", "fundsol"], seed=4, workers=2, output="x.json")
    assert RunConfig(**parse_config(rc.to_text())) == rc


def test_config_file_errors(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert main(["verify", "--config", str(bad)]) == 2
    assert main(["verify", "--config", str(tmp_path / "missing.cfg")]) == 2


def test_catalog_lists_anchors(capsys):
    assert main(["catalog"]) == 0
    out = capsys.readouterr().out
    assert "D3_conformal_commutator" in out and "[D3, C3(j)] = 6 x_j D3" in out


def test_spaces_and_fundsol(capsys):
    assert main(["spaces", "--m", "3", "--k", "2", "--show"]) == 0
    out = capsys.readouterr().out
    assert "dim H_k = 5" in out and "rank M_k = 3" in out
    assert main(["fundsol", "--m", "3", "--k", "1", "--which", "D3"]) == 0
    assert "annihilates 2/2" in capsys.readouterr().out


def test_render_op(capsys):
    assert main(["render-op", "D3", "--m", "3", "--k", "1"]) == 0
    assert capsys.readouterr().out.startswith("D3 = Dx^3")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hispin", "render-op", "Dx", "--m", "3", "--k", "0"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "Dx = e1 d/dx1 + e2 d/dx2 + e3 d/dx3" or proc.stdout.startswith("Dx")
