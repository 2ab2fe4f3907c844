#!/usr/bin/env python3
"""Seed a running service with demo cases for console development.

Creates two cases from the bundled fixtures: one left in FindingsIssued
(ready for adjudication) and one driven through the full correction loop
so the console's revision diff has something to show.

Usage: python scripts/seed_demo.py [base_url]   (default http://127.0.0.1:8800)
"""

from __future__ import annotations

import sys
from pathlib import Path

import httpx

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def main() -> None:
    base = sys.argv[1] if len(sys.argv) > 1 else "http://127.0.0.1:8800"
    client = httpx.Client(base_url=base, timeout=30.0)

    doc1 = (FIXTURES / "app_fig15.txt").read_bytes()
    doc2 = (FIXTURES / "app_fig15_rev2.txt").read_bytes()

    # Case A: stops at FindingsIssued
    doc_a = doc1.replace(b"FDI-2025-0001", b"DEMO-A-0001")
    print(client.post("/v1/applications", content=doc_a).json())
    print(client.post("/v1/applications/DEMO-A-0001/verify").json()["summary"])

    # Case B: full loop to Closed with two revisions
    doc_b1 = doc1.replace(b"FDI-2025-0001", b"DEMO-B-0001")
    doc_b2 = doc2.replace(b"FDI-2025-0001", b"DEMO-B-0001")
    print(client.post("/v1/applications", content=doc_b1).json())
    client.post("/v1/applications/DEMO-B-0001/verify")
    client.post("/v1/cases/DEMO-B-0001/request-correction")
    client.post("/v1/applications", content=doc_b2)
    client.post("/v1/applications/DEMO-B-0001/verify")
    client.post("/v1/cases/DEMO-B-0001/approve", json={"officer_id": "demo-officer"})
    print(client.post("/v1/cases/DEMO-B-0001/close").json())

    print("seeded: DEMO-A-0001 (FindingsIssued), DEMO-B-0001 (Closed, 2 revisions)")


if __name__ == "__main__":
    main()
