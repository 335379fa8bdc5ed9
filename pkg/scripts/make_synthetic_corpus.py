#!/usr/bin/env python3
"""Generate a seeded synthetic corpus for training and evaluation experiments.

Projects get random use case mixes (including extend/include relations and
scenario-based counts), random actor rosters, and random factor ratings.
Actual sizes can follow the classical weighted sum exactly (--actuals
karner-map), carry multiplicative noise (--actuals noisy), or be omitted
(--actuals none).  Output is a loadable corpus file.

Usage:
    python scripts/make_synthetic_corpus.py --projects 50 --out corpus.json
    python scripts/make_synthetic_corpus.py --projects 30 --actuals noisy --noise 0.15 --seed 7 --out noisy.json
"""

import argparse
import random
import sys
from pathlib import Path

from ucpoints import corpus as corpus_io
from ucpoints import karner
from ucpoints.model import (
    ACTOR_KINDS,
    RELATIONS,
    ActorSpec,
    FactorRatings,
    ProjectSpec,
    Scenario,
    UseCaseSpec,
)


def random_use_case(rng: random.Random, index: int) -> UseCaseSpec:
    relation = rng.choices(RELATIONS, weights=(7, 2, 2))[0]
    if rng.random() < 0.25:
        main = rng.randint(2, 8)
        ext = rng.randint(0, 6)
        return UseCaseSpec(
            name=f"uc{index:02d}", scenario=Scenario(main_steps=main, extension_steps=ext),
            relation=relation,
        )
    return UseCaseSpec(
        name=f"uc{index:02d}", transactions=rng.randint(1, 10), relation=relation
    )


def random_ratings(rng: random.Random) -> FactorRatings:
    # Keep the environmental profile low-risk-leaning so that the elevated
    # staffing rate shows up without dominating the corpus.
    technical = tuple(rng.randint(0, 5) for _ in range(13))
    environmental = tuple(rng.choices(range(6), weights=(1, 2, 4, 8, 4, 2))[0] for _ in range(8))
    return FactorRatings(technical=technical, environmental=environmental)


def random_project(rng: random.Random, index: int, actuals: str, noise: float) -> ProjectSpec:
    n_use_cases = rng.randint(3, 12)
    use_cases = tuple(random_use_case(rng, i) for i in range(n_use_cases))
    actors = tuple(
        ActorSpec(name=f"actor{i}", kind=rng.choice(ACTOR_KINDS))
        for i in range(rng.randint(1, 5))
    )
    project = ProjectSpec(
        id=f"SYN{index:03d}",
        use_cases=use_cases,
        actors=actors,
        factors=random_ratings(rng),
    )
    if actuals == "none":
        return project
    size = karner.uucp(project)
    if actuals == "noisy":
        size *= 1.0 + rng.uniform(-noise, noise)
    return ProjectSpec(
        id=project.id,
        use_cases=project.use_cases,
        actors=project.actors,
        factors=project.factors,
        actual_size_uucp=round(size, 2),
    )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--projects", type=int, default=50, help="corpus size (default: 50)")
    parser.add_argument("--seed", type=int, default=0, help="generator seed (default: 0)")
    parser.add_argument(
        "--actuals",
        choices=("karner-map", "noisy", "none"),
        default="karner-map",
        help="how to derive actual sizes (default: karner-map)",
    )
    parser.add_argument(
        "--noise",
        type=float,
        default=0.1,
        help="relative noise half-width for --actuals noisy (default: 0.1)",
    )
    parser.add_argument("--out", type=Path, required=True, help="corpus file to write")
    args = parser.parse_args(argv)
    if args.projects < 2:
        parser.error("--projects must be at least 2")
    if not 0.0 <= args.noise < 1.0:
        parser.error("--noise must be in [0, 1)")

    rng = random.Random(args.seed)
    import warnings

    from ucpoints.model import ClampWarning

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ClampWarning)
        projects = tuple(
            random_project(rng, i, args.actuals, args.noise) for i in range(args.projects)
        )
        built = corpus_io.Corpus(
            projects=projects,
            description=(
                f"synthetic corpus: {args.projects} projects, seed {args.seed}, "
                f"actuals {args.actuals}"
            ),
        )
        corpus_io.save(built, args.out)
        stages = {label: len(group) for label, group in corpus_io.partition_by_stage(built).items()}
    sys.stdout.write(
        f"wrote {len(built)} projects to {args.out} "
        f"(stage mix: {stages['stage1']}/{stages['stage2']}/{stages['stage3']})\n"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
