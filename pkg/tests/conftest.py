from __future__ import annotations

from pathlib import Path

import pytest

from tariffcheck.intake.parse import parse_application
from tariffcheck.kb.loader import parse_kb

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def golden_kb_bytes() -> bytes:
    return (FIXTURES / "kb_golden.yaml").read_bytes()


@pytest.fixture(scope="session")
def golden_kb(golden_kb_bytes):
    return parse_kb(golden_kb_bytes)


@pytest.fixture(scope="session")
def fig15_doc() -> bytes:
    return (FIXTURES / "app_fig15.txt").read_bytes()


@pytest.fixture(scope="session")
def fig15_app(fig15_doc):
    return parse_application(fig15_doc)


@pytest.fixture(scope="session")
def fig15_rev2_doc() -> bytes:
    return (FIXTURES / "app_fig15_rev2.txt").read_bytes()


@pytest.fixture()
def fixtures_dir() -> Path:
    return FIXTURES
