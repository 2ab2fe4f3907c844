#!/usr/bin/env python3
"""Sweep the synthetic throughput run over batch sizes and print a table.

Usage: python scripts/throughput_experiment.py [kb_path]
"""

from __future__ import annotations

import sys
from pathlib import Path

from tariffcheck.kb.loader import parse_kb
from tariffcheck.service.metrics import simulate_throughput

DEFAULT_KB = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "kb_golden.yaml"


def main() -> None:
    kb_path = Path(sys.argv[1]) if len(sys.argv) > 1 else DEFAULT_KB
    kb = parse_kb(kb_path.read_bytes())
    print(f"KB {kb.version} from {kb_path}")
    print(f"{'items':>7}  {'assisted_s':>10}  {'manual_min':>10}  {'reduction_%':>11}")
    for n in (30, 100, 300, 1000, 3000):
        stats = simulate_throughput(kb, n, manual_seconds_per_item=90.0)
        print(
            f"{n:>7}  {stats['wall_seconds_assisted']:>10.3f}  "
            f"{stats['manual_baseline_minutes']:>10.1f}  {stats['reduction_pct']:>11.2f}"
        )


if __name__ == "__main__":
    main()
