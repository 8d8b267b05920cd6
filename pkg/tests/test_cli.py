import subprocess
import sys

import pytest

from _support import CONTROL_CANONICAL, CONTROL_LISTING
from ktbt.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_fmt_listing(tmp_path, capsys):
    path = tmp_path / "control.sbt"
    path.write_text(CONTROL_LISTING)
    code, out, _ = run_cli(capsys, "bt", "fmt", str(path))
    assert code == 0 and out == CONTROL_CANONICAL + "\n"


def test_parse_prints_outline(capsys):
    code, out, _ = run_cli(capsys, "bt", "parse", "<Root><sq><c>(!a)<a>(B)<e>")
    assert code == 0
    assert out.splitlines() == ["Sequence", "  Condition(!a)", "  Action(B)"]


def test_parse_error_reports_byte_offset(capsys):
    code, out, err = run_cli(capsys, "bt", "parse", "<Root><sl><c>(a)")
    assert code != 0 and out == ""
    assert "byte 16" in err and "unclosed composite" in err


def test_query_unknown_prints_none(capsys):
    code, out, _ = run_cli(capsys, "bt", "query", CONTROL_CANONICAL, "_targetRDetectedF")
    assert code == 0 and out == "NONE\n"


def test_merge_then_query_round_trip(tmp_path, capsys):
    code, merged, _ = run_cli(capsys, "bt", "merge", CONTROL_CANONICAL, "<c>(_targetRDetectedF)", "<Root><a>(RetrieveRed)")
    assert code == 0
    assert "<sq><c>(_targetRDetectedF)<a>(RetrieveRed)<e><a>(RandomWalk)<e>" in merged
    path = tmp_path / "merged.sbt"
    path.write_text(merged)
    code, out, _ = run_cli(capsys, "bt", "query", str(path), "_targetRDetectedF")
    assert code == 0 and out == "<Root><a>(RetrieveRed)\n"


def test_sequence_argument_forms_agree(capsys):
    doc = "<Root><sl><sq><c>(a)<c>(!b)<a>(X)<e><a>(F)<e>"
    _, out1, _ = run_cli(capsys, "bt", "query", doc, "a,!b")
    _, out2, _ = run_cli(capsys, "bt", "query", doc, "<c>(a)<c>(!b)")
    assert out1 == out2 == "<Root><a>(X)\n"


def test_run_and_bad_config(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"composition=2,1,0,0,0,0 targets=2,2,2,2 iterations=300 trials=2 arena=300,300 output_dir={tmp_path / 'out'}\n")
    code, out, _ = run_cli(capsys, "run", str(cfg), "--workers", "1")
    assert code == 0 and "[run] trials=2" in out
    assert (tmp_path / "out" / "run_trial001.csv").exists()
    bad = tmp_path / "bad.cfg"
    bad.write_text("composition=0,0,3,3,3,3\ntargets=25,25,25\niterations=1 trials=1\n")
    code, _, err = run_cli(capsys, "run", str(bad))
    assert code == 1 and "targets requires 4 values" in err and "line 2" in err


def test_console_script_entry_point():
    out = subprocess.run([sys.executable, "-m", "ktbt.cli", "bt", "fmt", "<Root> <a>(X)"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout == "<Root><a>(X)\n"


def test_missing_file(capsys):
    code, _, err = run_cli(capsys, "bt", "fmt", "/nonexistent/file.sbt")
    assert code == 1 and "nonexistent" in err
