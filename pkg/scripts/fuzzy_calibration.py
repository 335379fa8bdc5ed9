#!/usr/bin/env python3
"""Calibration study for the graduated weight table.

Sweeps the inference operator choices (activation x aggregation) and, for the
shipped min/max pair, a range of sampling steps, reporting how far each
variant's ten-level table lands from the published targets.  The shipped
default (min activation, max aggregation, exact centroid) is the only variant
expected to sit within the +/-0.2 acceptance band at every level.

Usage:
    python scripts/fuzzy_calibration.py
    python scripts/fuzzy_calibration.py --steps 0.1 0.01 0.001 --format csv
"""

import argparse
import sys

from ucpoints import fuzzy
from ucpoints.metrics import Report, format_csv, format_table

PUBLISHED = {1: 5.0, 2: 5.0, 3: 6.45, 4: 7.5, 5: 8.55, 6: 10.0, 7: 11.4, 8: 12.5, 9: 13.6, 10: 15.0}


def variant_config(activation: str, aggregation: str, step: float | None) -> fuzzy.FuzzyConfig:
    base = fuzzy.default_config()
    return fuzzy.FuzzyConfig(
        inputs=base.inputs,
        outputs=base.outputs,
        rules=base.rules,
        activation=activation,
        aggregation=aggregation,
        centroid_step=step,
    )


def table_for(config: fuzzy.FuzzyConfig) -> fuzzy.AdjustedWeightTable:
    return fuzzy.AdjustedWeightTable.from_config(config)


def deviation_row(label: str, table: fuzzy.AdjustedWeightTable):
    deviations = [abs(table.weight(level) - PUBLISHED[level]) for level in range(1, 11)]
    worst_level = max(range(1, 11), key=lambda lv: deviations[lv - 1])
    return (
        label,
        max(deviations),
        sum(deviations) / len(deviations),
        worst_level,
        "yes" if max(deviations) <= 0.2 else "no",
    )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--steps",
        type=float,
        nargs="*",
        default=[0.1, 0.01, 0.001],
        help="sampling steps for the sampled-centroid comparison (default: 0.1 0.01 0.001)",
    )
    parser.add_argument("--format", choices=("table", "csv"), default="table")
    args = parser.parse_args(argv)

    rows = []
    for activation in fuzzy.ACTIVATIONS:
        for aggregation in fuzzy.AGGREGATIONS:
            config = variant_config(activation, aggregation, step=None)
            rows.append(deviation_row(f"{activation}/{aggregation} exact", table_for(config)))
    for step in args.steps:
        config = variant_config("min", "max", step=step)
        rows.append(deviation_row(f"min/max step={step:g}", table_for(config)))

    report = Report(
        header=("variant", "max_dev", "mean_dev", "worst_level", "within_0.2"),
        rows=tuple(rows),
        title="graduated weight table vs published targets",
    )
    render = format_csv if args.format == "csv" else format_table
    sys.stdout.write(render(report))

    default_dev = rows[0][1]
    sys.stdout.write(
        f"\nshipped default (min/max exact): max deviation {default_dev:.4f} "
        f"({'inside' if default_dev <= 0.2 else 'OUTSIDE'} the +/-0.2 band)\n"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
