"""CLI contract: exit codes, diagnostics, output formats, corpus runs."""

import json
import subprocess
import sys

import pytest

from kummertest import cli
from kummertest import corpus as corp


def run_cli(*argv):
    return cli.main(list(argv))


# -------------------------------------------------------------- exit codes

def test_analyze_success_exit_zero(capsys):
    assert run_cli("analyze", "1/n^2", "--window", "200",
                   "--probe-window", "300") == 0
    out = capsys.readouterr().out
    assert "fused verdict: converges" in out


def test_usage_errors_exit_64(capsys):
    with pytest.raises(SystemExit) as info:
        run_cli("analyze")  # missing expression
    assert info.value.code == 64
    with pytest.raises(SystemExit) as info:
        run_cli("nosuchcommand")
    assert info.value.code == 64
    with pytest.raises(SystemExit) as info:
        run_cli("analyze", "1/n", "--format", "yaml")
    assert info.value.code == 64
    assert run_cli("analyze", "1/n", "--emit-b") == 64
    assert run_cli("corpus") == 64


def test_parse_errors_exit_2_with_caret(capsys):
    cases = {
        "2n": 1,        # implicit multiplication
        "1+*2": 2,      # operator where an atom belongs
        "(1+2": 4,      # unclosed parenthesis
        "sin(n)": 0,    # unknown function
    }
    for text, offset in cases.items():
        assert run_cli("analyze", text) == 2, text
        err = capsys.readouterr().err
        lines = err.splitlines()
        assert lines[0].startswith("error:"), text
        assert lines[1] == "  " + text
        assert lines[2] == "  " + " " * offset + "^", text


def test_domain_error_exit_2(capsys):
    # ln(0) at n = 1
    assert run_cli("analyze", "ln(n-1)", "--window", "100",
                   "--probe-window", "100") == 2
    assert "error" in capsys.readouterr().err


def test_positivity_error_exit_2(capsys):
    assert run_cli("analyze", "5-n", "--window", "100",
                   "--probe-window", "100") == 2
    err = capsys.readouterr().err
    assert "positive" in err


def test_bad_parameter_values_exit_2(capsys):
    assert run_cli("analyze", "1/n", "--b1", "abc") == 2
    assert run_cli("analyze", "1/n", "--tests", "raabe,nosuch") == 2
    assert run_cli("analyze", "1/n", "--window", "1") == 2
    assert run_cli("analyze", "1/n", "--start", "0") == 2
    capsys.readouterr()


# ------------------------------------------------------------ json output

def test_json_deterministic_across_runs(capsys):
    assert run_cli("analyze", "1/2^n", "--format", "json") == 0
    first = capsys.readouterr().out
    assert run_cli("analyze", "1/2^n", "--format", "json") == 0
    second = capsys.readouterr().out
    assert first == second
    payload = json.loads(first)
    assert payload["expression"] == "1/2^n"
    assert payload["fused"]["outcome"] == "converges"
    assert payload["fused"]["confidence"] == "certified"
    assert [t["id"] for t in payload["tests"]] == list(
        ("root", "ratio", "raabe", "gauss", "bertrand", "kummer"))
    assert payload["kummer"]["N"] == 1


def test_json_floats_are_strings(capsys):
    assert run_cli("analyze", "1/n^3", "--format", "json") == 0
    payload = json.loads(capsys.readouterr().out)
    for t in payload["tests"]:
        est = t["witness"].get("estimate")
        assert est is None or isinstance(est, str)


# ------------------------------------------------------------- csv output

def test_emit_b_rows(capsys):
    assert run_cli("analyze", "1/2^n", "--b1", "3", "--format", "csv",
                   "--emit-b", "--window", "6") == 0
    out = capsys.readouterr().out
    lines = out.strip().splitlines()
    assert lines[0] == "n,a_n,B_n"
    assert len(lines) == 7
    assert lines[1].startswith("1,")
    assert lines[1].split(",")[2] == "3.0" or lines[1].split(",")[2] == "3"


def test_emit_b_rational(capsys):
    assert run_cli("analyze", "1/2^n", "--b1", "3", "--format", "csv",
                   "--emit-b", "--rational", "--window", "4") == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[1] == "1,1/2,3"
    assert lines[2] == "2,1/4,5"
    assert lines[4] == "4,1/16,17"


def test_emit_b_needs_csv_format(capsys):
    assert run_cli("analyze", "1/2^n", "--emit-b", "--format", "json") == 64
    assert run_cli("analyze", "1/2^n", "--format", "csv") == 64
    capsys.readouterr()


# ----------------------------------------------------------------- corpus

CORPUS_OK = """\
# two easy entries
1/n^2 | 1 | converges | p-series
2^n   | 1 | diverges  | terms explode
"""

CORPUS_MISMATCH = """\
1/n^2 | 1 | diverges | wrong on purpose
"""

CORPUS_MALFORMED = """\
1/n^2 | converges
"""


def test_corpus_ok_exit_zero(tmp_path, capsys):
    path = tmp_path / "ok.txt"
    path.write_text(CORPUS_OK)
    assert run_cli("corpus", str(path), "--window", "200",
                   "--probe-window", "400") == 0
    out = capsys.readouterr().out
    assert "2 entries: 2 matched, 0 undecided, 0 mismatched" in out


def test_corpus_mismatch_exit_one(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text(CORPUS_MISMATCH)
    assert run_cli("corpus", str(path), "--window", "200",
                   "--probe-window", "400") == 1
    out = capsys.readouterr().out
    assert "MISMATCH" in out
    assert "1 mismatched" in out


def test_corpus_malformed_exit_two(tmp_path, capsys):
    path = tmp_path / "malformed.txt"
    path.write_text(CORPUS_MALFORMED)
    assert run_cli("corpus", str(path)) == 2
    assert "line 1" in capsys.readouterr().err


def test_corpus_empty_exit_zero(tmp_path, capsys):
    path = tmp_path / "empty.txt"
    path.write_text("# nothing\n\n")
    assert run_cli("corpus", str(path)) == 0
    assert "0 entries" in capsys.readouterr().out


def test_corpus_missing_file_exit_two(tmp_path, capsys):
    assert run_cli("corpus", str(tmp_path / "nope.txt")) == 2
    assert "cannot read" in capsys.readouterr().err


def test_corpus_json_format(tmp_path, capsys):
    path = tmp_path / "ok.txt"
    path.write_text(CORPUS_OK)
    assert run_cli("corpus", str(path), "--format", "json", "--window", "200",
                   "--probe-window", "400") == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["summary"]["total"] == 2
    assert payload["summary"]["matched"] == 2
    assert payload["entries"][0]["expression"] == "1/n^2"
    assert payload["entries"][0]["report"]["fused"]["outcome"] == "converges"


def test_corpus_parallel_matches_serial(tmp_path, capsys):
    path = tmp_path / "ok.txt"
    path.write_text(CORPUS_OK)
    assert run_cli("corpus", str(path), "--format", "json", "--window", "200",
                   "--probe-window", "400") == 0
    serial = capsys.readouterr().out
    assert run_cli("corpus", str(path), "--format", "json", "--jobs", "2",
                   "--window", "200", "--probe-window", "400") == 0
    parallel = capsys.readouterr().out
    assert serial == parallel


def test_bundled_corpus_loads():
    path = corp.bundled_corpus_path()
    entries = corp.load_corpus(path)
    assert len(entries) >= 20
    labels = {e.label for e in entries}
    assert labels == {"converges", "diverges"}
    starts = {e.start for e in entries}
    assert 2 in starts  # at least one entry exercises a shifted start


def test_bundled_flag_conflicts_with_path(tmp_path, capsys):
    path = tmp_path / "x.txt"
    path.write_text(CORPUS_OK)
    assert run_cli("corpus", str(path), "--bundled") == 64
    capsys.readouterr()


# ------------------------------------------------------------ entry point

def test_console_script_wiring():
    proc = subprocess.run(
        [sys.executable, "-m", "kummertest.cli", "analyze", "1/n",
         "--tests", "raabe", "--window", "100", "--probe-window", "100"],
        capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert "fused verdict" in proc.stdout
