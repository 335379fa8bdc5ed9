"""Project-corpus ingestion, validation, persistence, and stage partitioning.

Corpora live in versioned JSON files whose field names mirror the domain
types one-to-one (see docs/file_formats.md).  Loading validates every
project and reports all violations together — project id, field, reason —
rather than stopping at the first.  Saving is deterministic, so
save -> load -> save reproduces the file byte for byte.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from . import karner, metrics
from .model import (
    ActorSpec,
    FactorRatings,
    ProjectSpec,
    Scenario,
    UseCaseSpec,
    ValidationError,
)

CORPUS_FORMAT_VERSION = 1

STAGE_LABELS = ("stage1", "stage2", "stage3")

logger = logging.getLogger(__name__)


class CorpusError(Exception):
    """Base class for corpus file problems."""


class CorpusParseError(CorpusError):
    """The corpus file is not well-formed; carries the line/column."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        super().__init__(message)
        self.line = line
        self.column = column


class CorpusValidationError(CorpusError, ValidationError):
    """One or more projects violate domain invariants; carries all issues."""

    def __init__(self, issues: Sequence[str]):
        self.issues = tuple(issues)
        super().__init__(
            f"{len(self.issues)} corpus validation issue(s):\n"
            + "\n".join(f"  - {issue}" for issue in self.issues)
        )


@dataclass(frozen=True)
class Corpus:
    """An immutable collection of validated projects with unique ids."""

    projects: tuple[ProjectSpec, ...]
    description: str = ""
    format_version: int = CORPUS_FORMAT_VERSION

    def __post_init__(self):
        object.__setattr__(self, "projects", tuple(self.projects))
        seen = set()
        for p in self.projects:
            if p.id in seen:
                raise ValidationError(f"duplicate project id {p.id!r}")
            seen.add(p.id)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(p.id for p in self.projects)

    def get(self, project_id: str) -> ProjectSpec:
        for p in self.projects:
            if p.id == project_id:
                return p
        raise ValidationError(f"no project with id {project_id!r}")

    def __len__(self) -> int:
        return len(self.projects)

    def __iter__(self):
        return iter(self.projects)


# --- parsing -------------------------------------------------------------

_PROJECT_KEYS = {
    "id",
    "use_cases",
    "actors",
    "technical",
    "environmental",
    "actual_size_uucp",
    "actual_effort_ph",
}
_USE_CASE_KEYS = {"name", "relation", "transactions", "scenario"}
_SCENARIO_KEYS = {"main_steps", "extension_steps"}
_ACTOR_KEYS = {"name", "kind"}


def _check_keys(data: dict, allowed: set, where: str, issues: list) -> None:
    for key in sorted(set(data) - allowed):
        issues.append(f"{where}: unknown field {key!r}")


def _parse_use_case(data, where: str, issues: list) -> UseCaseSpec | None:
    if not isinstance(data, dict):
        issues.append(f"{where}: expected an object, got {type(data).__name__}")
        return None
    _check_keys(data, _USE_CASE_KEYS, where, issues)
    scenario_data = data.get("scenario")
    scenario = None
    try:
        if scenario_data is not None:
            if not isinstance(scenario_data, dict):
                raise ValidationError("scenario must be an object")
            _check_keys(scenario_data, _SCENARIO_KEYS, f"{where}: scenario", issues)
            scenario = Scenario(
                main_steps=scenario_data.get("main_steps"),
                extension_steps=scenario_data.get("extension_steps", 0),
            )
        return UseCaseSpec(
            name=data.get("name"),
            transactions=data.get("transactions"),
            scenario=scenario,
            relation=data.get("relation", "base"),
        )
    except (ValidationError, TypeError) as exc:
        issues.append(f"{where}: {exc}")
        return None


def _parse_actor(data, where: str, issues: list) -> ActorSpec | None:
    if not isinstance(data, dict):
        issues.append(f"{where}: expected an object, got {type(data).__name__}")
        return None
    _check_keys(data, _ACTOR_KEYS, where, issues)
    try:
        return ActorSpec(name=data.get("name"), kind=data.get("kind"))
    except (ValidationError, TypeError) as exc:
        issues.append(f"{where}: {exc}")
        return None


def _parse_project(data, index: int, issues: list) -> ProjectSpec | None:
    where = f"project #{index + 1}"
    if not isinstance(data, dict):
        issues.append(f"{where}: expected an object, got {type(data).__name__}")
        return None
    pid = data.get("id")
    if isinstance(pid, str) and pid:
        where = f"project {pid!r}"
    else:
        issues.append(f"{where}: id must be a non-empty string, got {pid!r}")
        return None
    _check_keys(data, _PROJECT_KEYS, where, issues)

    before = len(issues)
    use_cases = [
        _parse_use_case(uc, f"{where}: use case #{i + 1}", issues)
        for i, uc in enumerate(data.get("use_cases") or [])
    ]
    actors = [
        _parse_actor(a, f"{where}: actor #{i + 1}", issues)
        for i, a in enumerate(data.get("actors") or [])
    ]
    factors = None
    try:
        factors = FactorRatings(
            technical=tuple(data.get("technical") or ()),
            environmental=tuple(data.get("environmental") or ()),
        )
    except (ValidationError, TypeError) as exc:
        issues.append(f"{where}: {exc}")
    if len(issues) > before or factors is None:
        return None
    try:
        return ProjectSpec(
            id=pid,
            use_cases=tuple(use_cases),
            actors=tuple(actors),
            factors=factors,
            actual_effort_ph=data.get("actual_effort_ph"),
            actual_size_uucp=data.get("actual_size_uucp"),
        )
    except (ValidationError, TypeError) as exc:
        issues.append(f"{where}: {exc}")
        return None


def load(path: str | Path) -> Corpus:
    """Read and validate a corpus file, collecting every violation."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorpusParseError(
            f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}",
            line=exc.lineno,
            column=exc.colno,
        ) from exc
    if not isinstance(data, dict):
        raise CorpusParseError(f"{path}: corpus file must hold a JSON object")
    version = data.get("format_version")
    if version != CORPUS_FORMAT_VERSION:
        raise ValidationError(f"unsupported corpus format_version {version!r}")
    raw_projects = data.get("projects")
    if not isinstance(raw_projects, list):
        raise ValidationError("corpus field 'projects' must be an array")

    issues: list[str] = []
    projects = [_parse_project(p, i, issues) for i, p in enumerate(raw_projects)]
    seen: set[str] = set()
    for p in projects:
        if p is None:
            continue
        if p.id in seen:
            issues.append(f"project {p.id!r}: duplicate id")
        seen.add(p.id)
    if issues:
        raise CorpusValidationError(issues)
    return Corpus(
        projects=tuple(projects),
        description=str(data.get("description", "")),
        format_version=version,
    )


def _project_to_dict(p: ProjectSpec) -> dict:
    use_cases = []
    for uc in p.use_cases:
        entry: dict = {"name": uc.name, "relation": uc.relation}
        if uc.transactions is not None:
            entry["transactions"] = uc.transactions
        else:
            entry["scenario"] = {
                "main_steps": uc.scenario.main_steps,
                "extension_steps": uc.scenario.extension_steps,
            }
        use_cases.append(entry)
    return {
        "id": p.id,
        "use_cases": use_cases,
        "actors": [{"name": a.name, "kind": a.kind} for a in p.actors],
        "technical": list(p.factors.technical),
        "environmental": list(p.factors.environmental),
        "actual_size_uucp": p.actual_size_uucp,
        "actual_effort_ph": p.actual_effort_ph,
    }


def save(corpus: Corpus, path: str | Path) -> None:
    """Write a corpus file; key order and float formatting are deterministic."""
    data = {
        "format_version": corpus.format_version,
        "description": corpus.description,
        "projects": [_project_to_dict(p) for p in corpus.projects],
    }
    Path(path).write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")


# --- stage partitioning --------------------------------------------------

def extend_include_ratio(project: ProjectSpec) -> float:
    """Share of the project's use cases that are extend/include relations."""
    related = sum(1 for uc in project.use_cases if uc.relation != "base")
    return related / len(project.use_cases)


def stage_of(project: ProjectSpec) -> str:
    """Evaluation stage from the extend/include ratio r: stage1 below 0.15,
    stage2 for 0.15..0.25 (both edges inclusive), stage3 above 0.25.

    Integer cross-multiplication keeps the band edges exact.
    """
    total = len(project.use_cases)
    related = sum(1 for uc in project.use_cases if uc.relation != "base")
    if 20 * related < 3 * total:  # r < 0.15
        return "stage1"
    if 4 * related <= total:  # r <= 0.25
        return "stage2"
    return "stage3"


def partition_by_stage(corpus: Corpus) -> dict[str, tuple[ProjectSpec, ...]]:
    """Corpus projects grouped by stage, corpus order preserved within each."""
    groups: dict[str, list[ProjectSpec]] = {label: [] for label in STAGE_LABELS}
    for p in corpus.projects:
        groups[stage_of(p)].append(p)
    return {label: tuple(ps) for label, ps in groups.items()}


# --- splitting -----------------------------------------------------------

def split(
    corpus: Corpus,
    train_ids: Iterable[str] | None = None,
    fraction: float | None = None,
    seed: int | None = None,
) -> tuple[Corpus, Corpus]:
    """Partition into (train, test), either by explicit ids or a seeded fraction.

    Both sides keep corpus order and must end up non-empty.
    """
    if (train_ids is None) == (fraction is None):
        raise ValidationError("give exactly one of train_ids or fraction")
    n = len(corpus.projects)
    if train_ids is not None:
        wanted = set(train_ids)
        known = set(corpus.ids)
        unknown = sorted(wanted - known)
        if unknown:
            raise ValidationError(f"unknown project ids in split: {unknown}")
        chosen = {i for i, p in enumerate(corpus.projects) if p.id in wanted}
    else:
        if not 0.0 < fraction < 1.0:
            raise ValidationError(f"fraction must be in (0, 1), got {fraction}")
        k = round(n * fraction)
        if k <= 0 or k >= n:
            raise ValidationError(
                f"degenerate split: fraction {fraction} puts {k} of {n} projects "
                f"on the train side"
            )
        chosen = set(random.Random(seed).sample(range(n), k))
    if not chosen or len(chosen) == n:
        raise ValidationError(
            f"degenerate split: {len(chosen)} of {n} projects on the train side"
        )
    train = tuple(p for i, p in enumerate(corpus.projects) if i in chosen)
    test = tuple(p for i, p in enumerate(corpus.projects) if i not in chosen)
    meta = {"description": corpus.description, "format_version": corpus.format_version}
    return Corpus(projects=train, **meta), Corpus(projects=test, **meta)


# --- actual size recovery ------------------------------------------------

def actual_uucp(
    project: ProjectSpec, constants: karner.FactorConstants = karner.DEFAULT_CONSTANTS
) -> float:
    """The project's actual size in UUCP.

    Taken directly when recorded; otherwise recovered from actual effort by
    dividing out the Schneider rate and then the TF/EF adjustment.  The
    conversion chain is logged.  A high-risk environmental signal does not
    block the conversion (the effort is historical fact), so the elevated
    rate applies.
    """
    if project.actual_size_uucp is not None:
        return project.actual_size_uucp
    if project.actual_effort_ph is None:
        raise ValidationError(f"project {project.id!r}: no actual size or effort recorded")
    rate = karner.schneider_rate(project.factors, force=True)
    ucp_value = project.actual_effort_ph / rate
    tf = karner.technical_factor(project.factors, constants)
    ef = karner.environmental_factor(project.factors, constants)
    size = karner.uucp_from_ucp(ucp_value, tf, ef)
    logger.info(
        "project %s: effort %g ph / %d ph/UCP -> UCP %g; / (TF %g x EF %g) -> UUCP %g",
        project.id,
        project.actual_effort_ph,
        rate,
        ucp_value,
        tf,
        ef,
        size,
    )
    return size


# --- summaries -----------------------------------------------------------

def summary_report(corpus: Corpus) -> metrics.Report:
    """One row per project: composition, extend/include ratio, stage, actuals."""
    rows = []
    for p in corpus.projects:
        rows.append(
            (
                p.id,
                len(p.use_cases),
                len(p.actors),
                extend_include_ratio(p),
                stage_of(p),
                p.actual_size_uucp if p.actual_size_uucp is not None else "",
                p.actual_effort_ph if p.actual_effort_ph is not None else "",
            )
        )
    return metrics.Report(
        header=(
            "project",
            "use_cases",
            "actors",
            "ext_ratio",
            "stage",
            "actual_uucp",
            "actual_effort_ph",
        ),
        rows=tuple(rows),
    )


def summary_csv(corpus: Corpus) -> str:
    return metrics.format_csv(summary_report(corpus))
