#!/usr/bin/env python3
"""Reproduce the published Lawson/IPM tables and write comparison reports."""

import argparse
import asyncio
import sys
from pathlib import Path

# Add src to path for development
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from chebydual.config import ChebyDualConfig
from chebydual.evaluation.table import TableComparator
from chebydual.harness.runner import TableRunner
from chebydual.reporting.formatters import ReportFormatter


def parse_args():
    parser = argparse.ArgumentParser(description="Reproduce the Lawson vs IPM tables")

    parser.add_argument(
        "--tables",
        "-t",
        nargs="+",
        type=int,
        choices=[1, 2],
        default=[1, 2],
        help="Tables to reproduce",
    )
    parser.add_argument(
        "--methods",
        "-m",
        nargs="+",
        choices=["lawson", "ipm"],
        help="Restrict to these methods",
    )
    parser.add_argument(
        "--output",
        "-o",
        type=Path,
        default=Path("results"),
        help="Output directory for results",
    )
    parser.add_argument(
        "--format",
        "-f",
        nargs="+",
        choices=["csv", "markdown"],
        default=["csv", "markdown"],
        help="Output formats",
    )

    return parser.parse_args()


async def main():
    args = parse_args()
    config = ChebyDualConfig()
    runner = TableRunner(config)
    comparator = TableComparator()
    args.output.mkdir(parents=True, exist_ok=True)

    for which in args.tables:
        try:
            outcomes = await runner.run(which, methods=args.methods)
        except Exception as e:
            print(f"\nError reproducing table {which}: {e}")
            sys.exit(1)

        rows = comparator.compare_all(outcomes)

        if "csv" in args.format:
            csv_path = args.output / f"table{which}.csv"
            ReportFormatter.write_csv(ReportFormatter.table_frame(rows), csv_path)
            print(f"\nCSV comparison saved to: {csv_path}")

        if "markdown" in args.format:
            md_path = args.output / f"table{which}.md"
            md_path.write_text(ReportFormatter.table_markdown(rows) + "\n")
            print(f"Markdown comparison saved to: {md_path}")

        ReportFormatter.print_table_summary(outcomes, rows)


if __name__ == "__main__":
    asyncio.run(main())
