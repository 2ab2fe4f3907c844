"""Command line interface.

Exit codes: 0 clean, 1 findings present (Discrepancy/Ineligible),
2 usage error, 3 validation error (bad KB or bad input document).
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from tariffcheck import canon
from tariffcheck.gpva.explain import render_report_text
from tariffcheck.gpva.model import FindingStatus
from tariffcheck.gpva.serialize import serialize_report
from tariffcheck.gpva.verify import verify_application
from tariffcheck.gir.engine import classify
from tariffcheck.gir.model import RULE_DISPLAY
from tariffcheck.intake.parse import ApplicationParseError, parse_application, parse_item_block
from tariffcheck.kb.loader import KbFormatError, parse_kb
from tariffcheck.service.config import ServiceConfig, load_config
from tariffcheck.service.metrics import simulate_throughput

EXIT_FINDINGS = 1
EXIT_VALIDATION = 3


def _load_kb(path: str):
    try:
        return parse_kb(Path(path).read_bytes())
    except (KbFormatError, OSError) as exc:
        click.echo(f"KB error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)


def _config(config_path: str | None, kb_path: str | None) -> ServiceConfig:
    cfg = load_config(config_path)
    if kb_path:
        cfg = ServiceConfig(**{**cfg.__dict__, "kb_path": kb_path})
    return cfg


@click.group()
def main() -> None:
    """HS-code verification for tariff exemption applications."""


@main.group()
def kb() -> None:
    """Knowledge base tools."""


@kb.command("validate")
@click.argument("path", type=click.Path(exists=True))
def kb_validate(path: str) -> None:
    """Validate a KB document; exit 0 when it loads cleanly."""
    snapshot = _load_kb(path)
    click.echo(
        f"OK: version {snapshot.version}, {len(snapshot.headings)} headings, "
        f"{len(snapshot.notes)} notes, {len(snapshot.exemptions)} exemption list(s)"
    )


@main.command()
@click.option("--kb", "kb_path", required=True, type=click.Path(exists=True))
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--report", "report_path", type=click.Path(), default=None,
              help="Write the canonical JSON report here.")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--text", is_flag=True, help="Print the human-readable report.")
def verify(kb_path: str, input_path: str, report_path: str | None,
           config_path: str | None, text: bool) -> None:
    """Verify an application document against a KB.

    Exits 0 only when no Discrepancy or Ineligible findings are present.
    """
    snapshot = _load_kb(kb_path)
    cfg = _config(config_path, kb_path)
    try:
        application = parse_application(Path(input_path).read_bytes())
    except ApplicationParseError as exc:
        click.echo(f"input error: {exc}", err=True)
        for problem in exc.problems:
            click.echo(f"  item {problem.index} [{problem.field}]: {problem.message}", err=True)
        sys.exit(EXIT_VALIDATION)
    report = verify_application(snapshot, application, cfg.verifier())
    payload = serialize_report(report)
    if report_path:
        Path(report_path).write_bytes(payload)
        click.echo(f"report written to {report_path}")
    if text:
        click.echo(render_report_text(report))
    for status, count in sorted(report.summary.items()):
        click.echo(f"{status}: {count}")
    blocking = (FindingStatus.DISCREPANCY.value, FindingStatus.INELIGIBLE.value)
    if any(report.summary[s] for s in blocking):
        sys.exit(EXIT_FINDINGS)


@main.command("classify")
@click.option("--kb", "kb_path", required=True, type=click.Path(exists=True))
@click.option("--item", "item_path", required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def classify_cmd(kb_path: str, item_path: str, config_path: str | None) -> None:
    """Classify a single item file (key = value lines) and print the trace."""
    snapshot = _load_kb(kb_path)
    cfg = _config(config_path, kb_path)
    try:
        item = parse_item_block(Path(item_path).read_text(encoding="utf-8"))
    except ApplicationParseError as exc:
        click.echo(f"item error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    result = classify(snapshot, item, cfg.engine())
    if result.code is None:
        click.echo("code: undetermined")
    else:
        click.echo(f"code: {result.code.display()} ({result.code.digits})")
    click.echo(f"confidence: {result.confidence:.2f}")
    if result.evidence_incomplete:
        click.echo("evidence: incomplete" + (
            f" (missing: {', '.join(result.missing_attrs)})" if result.missing_attrs else ""
        ))
    for i, step in enumerate(result.trace, start=1):
        click.echo(f"  {i}. {RULE_DISPLAY[step.rule]}: {step.justification}")


@main.command("simulate-throughput")
@click.argument("n_items", type=int)
@click.option("--kb", "kb_path", required=True, type=click.Path(exists=True))
@click.option("--manual-seconds-per-item", type=float, default=90.0, show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def simulate_throughput_cmd(n_items: int, kb_path: str, manual_seconds_per_item: float,
                            config_path: str | None) -> None:
    """Verify N synthetic items and report the manual-baseline comparison."""
    if n_items < 0:
        click.echo("n_items must be >= 0", err=True)
        sys.exit(2)
    snapshot = _load_kb(kb_path)
    cfg = _config(config_path, kb_path)
    stats = simulate_throughput(snapshot, n_items, manual_seconds_per_item, cfg.verifier())
    click.echo(canon.canonical_dumps(stats))


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--kb", "kb_path", type=click.Path(exists=True), default=None)
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.option("--storage", "storage_path", type=click.Path(), default=None)
def serve(config_path: str | None, kb_path: str | None, host: str | None,
          port: int | None, storage_path: str | None) -> None:
    """Run the HTTP API."""
    import uvicorn

    from tariffcheck.service.app import create_app

    cfg = load_config(config_path)
    overrides = {}
    if kb_path:
        overrides["kb_path"] = kb_path
    if host:
        overrides["listen_host"] = host
    if port:
        overrides["listen_port"] = port
    if storage_path:
        overrides["storage_path"] = storage_path
    if overrides:
        cfg = ServiceConfig(**{**cfg.__dict__, **overrides})
    app = create_app(cfg)
    uvicorn.run(app, host=cfg.listen_host, port=cfg.listen_port)


if __name__ == "__main__":
    main()
