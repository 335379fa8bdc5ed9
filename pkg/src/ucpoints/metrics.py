"""Estimation-accuracy statistics and model-comparison reports.

Per-observation measures are MRE (error relative to the actual) and MER
(error relative to the estimate); sets of observations summarize to MMRE,
MMER, and mean signed error with sample standard deviation.

Sign convention: internally the signed error is actual - predicted; published
comparison tables print the opposite ("estimate minus actual"), so the report
layer negates at display time and labels the column accordingly.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from statistics import fmean, stdev
from typing import Sequence

from .model import ValidationError


@dataclass(frozen=True)
class ObservationPair:
    """One project's actual size (or effort) and one model's prediction of it."""

    project_id: str
    actual: float
    predicted: float

    def __post_init__(self):
        if not self.actual > 0:
            raise ValidationError(
                f"project {self.project_id!r}: actual must be positive, got {self.actual}"
            )
        if not self.predicted > 0:
            raise ValidationError(
                f"project {self.project_id!r}: predicted must be positive, got {self.predicted}"
            )


@dataclass(frozen=True)
class AccuracySummary:
    """Aggregate accuracy of one model over one set of projects.

    ``sd`` is None for a single observation (sample SD needs n >= 2).
    ``project_ids`` records which projects the summary covers so that
    cross-model comparisons can refuse mismatched sets.
    """

    mmre: float
    mmer: float
    mean_error: float  # actual - predicted
    sd: float | None
    n: int
    project_ids: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "project_ids", tuple(self.project_ids))
        if self.n < 1 or self.n != len(self.project_ids):
            raise ValidationError(f"n={self.n} does not match {len(self.project_ids)} projects")
        if self.mmre < 0 or self.mmer < 0:
            raise ValidationError("MMRE and MMER are non-negative by construction")
        if (self.sd is None) != (self.n == 1):
            raise ValidationError("sd must be None exactly when n == 1")
        if self.sd is not None and self.sd < 0:
            raise ValidationError(f"sd must be non-negative, got {self.sd}")


@dataclass(frozen=True)
class Improvement:
    """Accuracy gain of a candidate over a baseline, in percentage points.

    Positive means the candidate's error mean is lower.  Points are absolute
    differences of the two means times 100 (0.57 -> 0.35 is +22), not a
    relative change.
    """

    mmre_points: float
    mmer_points: float


def mre(pair: ObservationPair) -> float:
    """Magnitude of relative error: |actual - predicted| / actual."""
    return abs(pair.actual - pair.predicted) / pair.actual


def mer(pair: ObservationPair) -> float:
    """Magnitude of error relative to the estimate: |actual - predicted| / predicted."""
    return abs(pair.actual - pair.predicted) / pair.predicted


def error(pair: ObservationPair) -> float:
    """Signed error, internal convention: actual - predicted."""
    return pair.actual - pair.predicted


def summarize(pairs: Sequence[ObservationPair]) -> AccuracySummary:
    """MMRE, MMER, and mean signed error with sample (N-1) standard deviation."""
    pairs = tuple(pairs)
    if not pairs:
        raise ValidationError("cannot summarize zero observations")
    errors = [error(p) for p in pairs]
    return AccuracySummary(
        mmre=fmean(mre(p) for p in pairs),
        mmer=fmean(mer(p) for p in pairs),
        mean_error=fmean(errors),
        sd=stdev(errors) if len(pairs) >= 2 else None,
        n=len(pairs),
        project_ids=tuple(p.project_id for p in pairs),
    )


def improvement(base: AccuracySummary, candidate: AccuracySummary) -> Improvement:
    """Percentage-point gains of candidate over base; refuses mismatched sets."""
    if sorted(base.project_ids) != sorted(candidate.project_ids):
        raise ValidationError(
            "improvement needs both summaries over the same project set, got "
            f"{sorted(base.project_ids)} vs {sorted(candidate.project_ids)}"
        )
    return Improvement(
        mmre_points=(base.mmre - candidate.mmre) * 100.0,
        mmer_points=(base.mmer - candidate.mmer) * 100.0,
    )


# --- reports -------------------------------------------------------------

@dataclass(frozen=True)
class Report:
    """A rendered-format-agnostic table: header, body rows, footer rows.

    Cells are strings or numbers; numbers render at 2 decimals in both output
    formats (full precision stays in the underlying summaries).
    """

    header: tuple[str, ...]
    rows: tuple[tuple, ...]
    footers: tuple[tuple, ...] = ()
    title: str = ""

    def __post_init__(self):
        object.__setattr__(self, "header", tuple(self.header))
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        object.__setattr__(self, "footers", tuple(tuple(r) for r in self.footers))
        width = len(self.header)
        for row in self.rows + self.footers:
            if len(row) != width:
                raise ValidationError(
                    f"report row {row!r} has {len(row)} cells, header has {width}"
                )


@dataclass(frozen=True)
class ModelColumn:
    """One model's observations, aligned project-for-project with the others."""

    name: str
    pairs: tuple[ObservationPair, ...]

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))
        if not self.pairs:
            raise ValidationError(f"model column {self.name!r} has no observations")


def comparison_report(
    columns: Sequence[ModelColumn],
    baseline: str | None = None,
    title: str = "",
) -> Report:
    """Side-by-side accuracy table for one or more models on the same projects.

    Per project and model: estimate, MRE, MER, and the display-convention
    signed error (predicted - actual, labelled "model-actual").  Footer rows
    give the means, the error standard deviation, and — when there is a
    baseline to compare against — MMRE/MMER improvements in percentage points.
    """
    columns = list(columns)
    if not columns:
        raise ValidationError("comparison_report needs at least one model column")
    spine = [(p.project_id, p.actual) for p in columns[0].pairs]
    for col in columns[1:]:
        if [(p.project_id, p.actual) for p in col.pairs] != spine:
            raise ValidationError(
                f"model column {col.name!r} does not cover the same projects/actuals "
                f"as {columns[0].name!r}"
            )
    baseline = baseline if baseline is not None else columns[0].name
    names = [c.name for c in columns]
    if baseline not in names:
        raise ValidationError(f"baseline {baseline!r} is not among the models {names}")

    header = ["project", "actual"]
    for col in columns:
        header += [col.name, "mre", "mer", f"{col.name}-actual"]

    rows = []
    for i, (pid, actual) in enumerate(spine):
        row = [pid, actual]
        for col in columns:
            p = col.pairs[i]
            row += [p.predicted, mre(p), mer(p), p.predicted - p.actual]
        rows.append(tuple(row))

    summaries = {c.name: summarize(c.pairs) for c in columns}
    mean_row = ["mean", fmean(a for _, a in spine)]
    sd_row = ["standard dev", ""]
    for col in columns:
        s = summaries[col.name]
        mean_row += [fmean(p.predicted for p in col.pairs), s.mmre, s.mmer, -s.mean_error]
        sd_row += ["", "", "", s.sd if s.sd is not None else "n/a"]
    footers = [tuple(mean_row), tuple(sd_row)]

    if len(columns) > 1:
        impr_row = ["improvement", ""]
        for col in columns:
            if col.name == baseline:
                impr_row += ["", "", "", ""]
            else:
                gain = improvement(summaries[baseline], summaries[col.name])
                points = [
                    0.0 if round(p) == 0 else p
                    for p in (gain.mmre_points, gain.mmer_points)
                ]
                impr_row += ["", f"{points[0]:+.0f}%", f"{points[1]:+.0f}%", ""]
        footers.append(tuple(impr_row))

    return Report(header=tuple(header), rows=tuple(rows), footers=tuple(footers), title=title)


def _cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, bool) or value is None:
        return str(value)
    if isinstance(value, int):
        return str(value)
    if round(value, 2) == 0:
        value = 0.0  # avoid the "-0.00" artifact
    return f"{value:.2f}"


def format_table(report: Report) -> str:
    """Aligned plain-text rendering; first column left, the rest right."""
    cells = [list(report.header)] + [
        [_cell(v) for v in row] for row in report.rows + report.footers
    ]
    widths = [max(len(r[i]) for r in cells) for i in range(len(report.header))]
    lines = []
    if report.title:
        lines.append(report.title)
    rule = "  ".join("-" * w for w in widths)

    def render(row):
        return "  ".join(
            cell.ljust(w) if i == 0 else cell.rjust(w)
            for i, (cell, w) in enumerate(zip(row, widths))
        ).rstrip()

    lines.append(render(cells[0]))
    lines.append(rule)
    body = cells[1 : 1 + len(report.rows)]
    lines += [render(r) for r in body]
    if report.footers:
        lines.append(rule)
        lines += [render(r) for r in cells[1 + len(report.rows) :]]
    return "\n".join(lines) + "\n"


def format_csv(report: Report) -> str:
    """CSV rendering: '.' decimal, no thousands separators, 2-decimal numbers."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(report.header)
    for row in report.rows + report.footers:
        writer.writerow([_cell(v) for v in row])
    return buffer.getvalue()
