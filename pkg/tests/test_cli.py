"""CLI exit-code contract and output shapes."""

from __future__ import annotations

import json

from click.testing import CliRunner

from tariffcheck.service.cli import main


def run(*args):
    return CliRunner().invoke(main, list(args))


def test_kb_validate_golden(fixtures_dir):
    result = run("kb", "validate", str(fixtures_dir / "kb_golden.yaml"))
    assert result.exit_code == 0
    assert "OK" in result.output


def test_kb_validate_broken(tmp_path, golden_kb_bytes):
    broken = tmp_path / "bad.yaml"
    broken.write_bytes(golden_kb_bytes.replace(b'redirect: "9503"', b'redirect: "9999"'))
    result = run("kb", "validate", str(broken))
    assert result.exit_code == 3


def test_verify_fig15_exits_1_with_report(fixtures_dir, tmp_path):
    report_path = tmp_path / "report.json"
    result = run(
        "verify",
        "--kb", str(fixtures_dir / "kb_golden.yaml"),
        "--input", str(fixtures_dir / "app_fig15.txt"),
        "--report", str(report_path),
    )
    assert result.exit_code == 1
    report = json.loads(report_path.read_text())
    assert report["summary"]["Discrepancy"] == 2
    assert "Discrepancy: 2" in result.output


def test_verify_clean_application_exits_0(fixtures_dir):
    result = run(
        "verify",
        "--kb", str(fixtures_dir / "kb_golden.yaml"),
        "--input", str(fixtures_dir / "app_fig15_rev2.txt"),
    )
    assert result.exit_code == 0
    assert "Verified: 2" in result.output


def test_verify_bad_input_exits_3(fixtures_dir, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("app_id = X-1\napplicant = Y\nrevision = 1\nsubmitted_at = 2025-01-01T00:00:00Z\n")
    result = run(
        "verify", "--kb", str(fixtures_dir / "kb_golden.yaml"), "--input", str(bad)
    )
    assert result.exit_code == 3


def test_usage_error_exits_2():
    assert run("verify").exit_code == 2


def test_classify_prints_code_and_trace(fixtures_dir):
    result = run(
        "classify",
        "--kb", str(fixtures_dir / "kb_golden.yaml"),
        "--item", str(fixtures_dir / "item_toy.txt"),
    )
    assert result.exit_code == 0
    assert "code: 9503" in result.output
    assert "GIR 1" in result.output
    assert "GIR 6" in result.output


def test_simulate_throughput_zero_items(fixtures_dir):
    result = run(
        "simulate-throughput", "0", "--kb", str(fixtures_dir / "kb_golden.yaml")
    )
    assert result.exit_code == 0
    stats = json.loads(result.output)
    assert stats["manual_baseline_seconds"] == 0
    assert stats["reduction_pct"] == 0
    assert stats["reduction_defined"] is False


def test_simulate_throughput_small_run(fixtures_dir):
    result = run(
        "simulate-throughput", "12", "--kb", str(fixtures_dir / "kb_golden.yaml")
    )
    stats = json.loads(result.output)
    assert stats["items_verified"] == 12
    assert stats["manual_baseline_seconds"] == 12 * 90
    assert stats["reduction_defined"] is True
