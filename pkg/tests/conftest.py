"""Shared fixtures: the benchmark observation table, the sample corpus, and a
small project factory.  Also collects the acceptance gate's one-line verdicts
and prints them in the terminal summary, where capture cannot hide them."""

import json
from pathlib import Path

import pytest

_criterion_lines: list[str] = []


def announce_criterion(text: str) -> None:
    """Record one acceptance-criterion verdict for the end-of-run summary."""
    _criterion_lines.append(text)


def pytest_terminal_summary(terminalreporter):
    if _criterion_lines:
        terminalreporter.section("acceptance criteria")
        for line in _criterion_lines:
            terminalreporter.write_line(line)

from ucpoints.metrics import ObservationPair
from ucpoints.model import ActorSpec, FactorRatings, ProjectSpec, UseCaseSpec

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def benchmark():
    """20 projects with actuals, two models' estimates, published statistics,
    and exact re-derived statistics."""
    return json.loads((DATA_DIR / "benchmark_observations.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def stage_pairs(benchmark):
    """Factory: ObservationPairs of one model over one stage (or all)."""

    def _pairs(model, stage=None):
        return [
            ObservationPair(project_id=p["id"], actual=p["actual"], predicted=p[model])
            for p in benchmark["projects"]
            if stage is None or p["stage"] == stage
        ]

    return _pairs


@pytest.fixture(scope="session")
def sample_corpus_path():
    return DATA_DIR / "sample_corpus.json"


@pytest.fixture()
def sample_corpus(sample_corpus_path):
    from ucpoints import corpus

    return corpus.load(sample_corpus_path)


@pytest.fixture()
def make_project():
    """Quickly build a valid project from transaction levels and actor kinds."""

    def _make(
        levels=(2,),
        actors=("simple",),
        technical=(3,) * 13,
        environmental=(3,) * 8,
        pid="P",
        relations=None,
        **extra,
    ):
        relations = relations or ("base",) * len(levels)
        return ProjectSpec(
            id=pid,
            use_cases=tuple(
                UseCaseSpec(name=f"uc{i}", transactions=level, relation=rel)
                for i, (level, rel) in enumerate(zip(levels, relations))
            ),
            actors=tuple(ActorSpec(name=f"a{i}", kind=kind) for i, kind in enumerate(actors)),
            factors=FactorRatings(technical=technical, environmental=environmental),
            **extra,
        )

    return _make
