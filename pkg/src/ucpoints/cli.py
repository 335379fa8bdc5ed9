"""Command-line surface: estimate, fuzzy-table, train, predict, evaluate.

Exit codes: 0 success, 1 validation failure, 2 I/O or file-format failure,
3 numeric/convergence failure.  Identical invocations produce byte-identical
reports; diagnostics and per-project warnings go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from . import corpus as corpus_io
from . import fuzzy, karner, metrics, mlp
from .model import TransactionPolicy, ValidationError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_NUMERIC = 3

MODEL_NAMES = ("karner", "fuzzy", "mlp")

_ALGORITHM_BY_FLAG = {"lm": "levenberg_marquardt", "backprop": "gradient_backprop"}

_STAGE_TITLES = {
    "stage1": "stage1 (extend/include ratio < 0.15)",
    "stage2": "stage2 (extend/include ratio 0.15..0.25)",
    "stage3": "stage3 (extend/include ratio > 0.25)",
}


@dataclass(frozen=True)
class CommandConfig:
    """A fully validated invocation; flag conflicts are rejected here, before
    any file is touched."""

    subcommand: str
    corpus_path: Path | None = None
    models: tuple[str, ...] = ("karner", "fuzzy")
    model_file: Path | None = None
    fuzzy_config: Path | None = None
    extension_weight: float = 1.0
    rate: str = "schneider"
    force_rate: bool = False
    output_format: str = "table"
    output_path: Path | None = None
    by_stage: bool = False
    seed: int = 0
    algorithm: str = "levenberg_marquardt"
    epochs: int = 200
    hidden_width: int = mlp.DEFAULT_HIDDEN_WIDTH
    learning_rate: float = 0.01
    target_sse: float = 1e-10
    out_path: Path | None = None

    def __post_init__(self):
        object.__setattr__(self, "models", tuple(self.models))
        if self.subcommand not in ("estimate", "fuzzy-table", "train", "predict", "evaluate"):
            raise ValidationError(f"unknown subcommand {self.subcommand!r}")
        if not self.models or len(set(self.models)) != len(self.models):
            raise ValidationError(f"models must be a non-empty set, got {self.models}")
        for name in self.models:
            if name not in MODEL_NAMES:
                raise ValidationError(f"unknown model {name!r}; choose from {MODEL_NAMES}")
        if "mlp" in self.models and self.model_file is None:
            raise ValidationError("the mlp model needs --model-file")
        if self.model_file is not None and "mlp" not in self.models:
            raise ValidationError("--model-file given but the mlp model is not selected")
        if self.rate not in ("schneider", "karner"):
            raise ValidationError(f"rate must be schneider or karner, got {self.rate!r}")
        if self.force_rate and self.rate != "schneider":
            raise ValidationError("--force-rate only applies to the schneider rate")
        if self.output_format not in ("table", "csv"):
            raise ValidationError(f"format must be table or csv, got {self.output_format!r}")
        if not 0.0 <= self.extension_weight <= 1.0:
            raise ValidationError(
                f"extension weight must be in [0, 1], got {self.extension_weight}"
            )
        if self.algorithm not in mlp.ALGORITHMS:
            raise ValidationError(f"algorithm must be one of {mlp.ALGORITHMS}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ucpoints",
        description="Use case points sizing: classical weights, graduated fuzzy "
        "weights, and a trained network estimator.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="command")

    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument(
        "--format",
        choices=("table", "csv"),
        default="table",
        help="output format (default: table)",
    )
    fmt.add_argument(
        "--output",
        type=Path,
        default=None,
        metavar="FILE",
        help="write the report to FILE instead of stdout",
    )

    pol = argparse.ArgumentParser(add_help=False)
    pol.add_argument(
        "--extension-weight",
        type=float,
        default=1.0,
        metavar="W",
        help="weight of extension-part transactions relative to main-scenario "
        "ones, in [0, 1] (default: 1.0)",
    )

    rate = argparse.ArgumentParser(add_help=False)
    rate.add_argument(
        "--rate",
        choices=("schneider", "karner"),
        default="schneider",
        help="effort rate rule: schneider picks 20 or 28 ph/UCP from the "
        "environmental ratings, karner is a flat 20 (default: schneider)",
    )
    rate.add_argument(
        "--force-rate",
        action="store_true",
        help="apply 28 ph/UCP even when the ratings signal a high-risk team",
    )

    est = sub.add_parser(
        "estimate",
        parents=[fmt, pol, rate],
        help="size and effort per project for the selected models",
    )
    est.add_argument("corpus", type=Path, help="corpus file")
    est.add_argument(
        "--models",
        default="karner,fuzzy",
        metavar="LIST",
        help="comma-separated models: karner, fuzzy, mlp (default: karner,fuzzy)",
    )
    est.add_argument(
        "--model-file",
        type=Path,
        default=None,
        metavar="FILE",
        help="trained model file (required when mlp is selected)",
    )
    est.add_argument(
        "--fuzzy-config",
        type=Path,
        default=None,
        metavar="FILE",
        help="fuzzy configuration overriding the built-in default",
    )

    ft = sub.add_parser(
        "fuzzy-table", parents=[fmt], help="print the graduated complexity weight table"
    )
    ft.add_argument(
        "--fuzzy-config",
        type=Path,
        default=None,
        metavar="FILE",
        help="fuzzy configuration overriding the built-in default",
    )

    tr = sub.add_parser(
        "train", parents=[pol], help="fit the network size model on a corpus with actuals"
    )
    tr.add_argument("corpus", type=Path, help="corpus file (every project needs actuals)")
    tr.add_argument("--out", type=Path, required=True, metavar="FILE", help="model file to write")
    tr.add_argument(
        "--algorithm",
        choices=tuple(_ALGORITHM_BY_FLAG),
        default="lm",
        help="training algorithm (default: lm)",
    )
    tr.add_argument("--epochs", type=int, default=200, help="epoch budget (default: 200)")
    tr.add_argument(
        "--hidden",
        type=int,
        default=mlp.DEFAULT_HIDDEN_WIDTH,
        metavar="N",
        help=f"hidden layer width, {mlp.MIN_HIDDEN_WIDTH}..{mlp.MAX_HIDDEN_WIDTH} "
        f"(default: {mlp.DEFAULT_HIDDEN_WIDTH})",
    )
    tr.add_argument(
        "--learning-rate",
        type=float,
        default=0.01,
        help="step size for the backprop algorithm (default: 0.01)",
    )
    tr.add_argument(
        "--target-sse",
        type=float,
        default=1e-10,
        help="stop once the normalized SSE falls this low (default: 1e-10)",
    )
    tr.add_argument("--seed", type=int, default=0, help="initialization seed (default: 0)")

    pr = sub.add_parser(
        "predict",
        parents=[fmt, pol, rate],
        help="size and effort per project from a trained model file",
    )
    pr.add_argument("corpus", type=Path, help="corpus file")
    pr.add_argument(
        "--model-file", type=Path, required=True, metavar="FILE", help="trained model file"
    )

    ev = sub.add_parser(
        "evaluate",
        parents=[fmt, pol],
        help="accuracy of the selected models against recorded actuals",
    )
    ev.add_argument("corpus", type=Path, help="corpus file (every project needs actuals)")
    ev.add_argument(
        "--models",
        default="karner,fuzzy",
        metavar="LIST",
        help="comma-separated models: karner, fuzzy, mlp (default: karner,fuzzy); "
        "the first is the improvement baseline",
    )
    ev.add_argument("--model-file", type=Path, default=None, metavar="FILE")
    ev.add_argument("--fuzzy-config", type=Path, default=None, metavar="FILE")
    ev.add_argument(
        "--by-stage", action="store_true", help="group the report by extend/include stage"
    )
    return parser


def _config_from_args(args: argparse.Namespace) -> CommandConfig:
    common = {
        "subcommand": args.subcommand,
        "corpus_path": getattr(args, "corpus", None),
        "output_format": getattr(args, "format", "table"),
        "output_path": getattr(args, "output", None),
        "extension_weight": getattr(args, "extension_weight", 1.0),
    }
    if args.subcommand in ("estimate", "evaluate"):
        models = tuple(m.strip() for m in args.models.split(",") if m.strip())
        return CommandConfig(
            **common,
            models=models,
            model_file=args.model_file,
            fuzzy_config=args.fuzzy_config,
            rate=getattr(args, "rate", "schneider"),
            force_rate=getattr(args, "force_rate", False),
            by_stage=getattr(args, "by_stage", False),
        )
    if args.subcommand == "predict":
        return CommandConfig(
            **common,
            models=("mlp",),
            model_file=args.model_file,
            rate=args.rate,
            force_rate=args.force_rate,
        )
    if args.subcommand == "train":
        return CommandConfig(
            **common,
            models=("karner",),  # unused; keeps the config valid
            algorithm=_ALGORITHM_BY_FLAG[args.algorithm],
            epochs=args.epochs,
            hidden_width=args.hidden,
            learning_rate=args.learning_rate,
            target_sse=args.target_sse,
            seed=args.seed,
            out_path=args.out,
        )
    return CommandConfig(**common, fuzzy_config=args.fuzzy_config)  # fuzzy-table


# --- shared pieces -------------------------------------------------------

def _fuzzy_table(cfg: CommandConfig) -> fuzzy.AdjustedWeightTable:
    if cfg.fuzzy_config is None:
        return fuzzy.default_table()
    return fuzzy.AdjustedWeightTable.from_config(fuzzy.load_config(cfg.fuzzy_config))


def _estimators(cfg: CommandConfig, policy: TransactionPolicy):
    """Per-model estimate functions ProjectSpec -> SizeEstimate."""
    estimators = {}
    for name in cfg.models:
        if name == "karner":
            estimators[name] = lambda p: karner.estimate(p, policy)
        elif name == "fuzzy":
            table = _fuzzy_table(cfg)
            estimators[name] = lambda p, table=table: fuzzy.estimate(p, policy, table)
        else:
            model = mlp.load_model(cfg.model_file)
            estimators[name] = lambda p, model=model: mlp.estimate(p, model, policy)
    return estimators


def _attach_effort(cfg: CommandConfig, project, est: karner.SizeEstimate):
    """Effort at the configured rate; high-risk projects warn and omit it."""
    if cfg.rate == "karner":
        rate = karner.KARNER_RATE_PH_PER_UCP
    else:
        try:
            rate = karner.schneider_rate(project.factors, force=cfg.force_rate)
        except karner.HighRiskTeamError as exc:
            print(f"warning: project {project.id}: {exc}", file=sys.stderr)
            return est
    return replace(est, effort_ph=karner.effort(est.ucp, rate), rate_ph_per_ucp=rate)


def _estimation_report(cfg: CommandConfig, projects) -> metrics.Report:
    policy = TransactionPolicy(extension_weight=cfg.extension_weight)
    estimators = _estimators(cfg, policy)
    rows = []
    for project in projects:
        for name in cfg.models:
            est = _attach_effort(cfg, project, estimators[name](project))
            rows.append(
                (
                    project.id,
                    name,
                    est.uucp,
                    est.tf,
                    est.ef,
                    est.ucp,
                    est.rate_ph_per_ucp if est.rate_ph_per_ucp is not None else "",
                    est.effort_ph if est.effort_ph is not None else "",
                )
            )
    return metrics.Report(
        header=("project", "model", "uucp", "tf", "ef", "ucp", "rate", "effort_ph"),
        rows=tuple(rows),
    )


def _render(cfg: CommandConfig, reports) -> str:
    if isinstance(reports, metrics.Report):
        reports = [reports]
    pieces = []
    for report in reports:
        if cfg.output_format == "csv":
            text = metrics.format_csv(report)
            if report.title:
                text = f"# {report.title}\n{text}"
        else:
            text = metrics.format_table(report)
        pieces.append(text)
    return "\n".join(pieces)


# --- subcommands ---------------------------------------------------------

def _cmd_estimate(cfg: CommandConfig) -> str:
    loaded = corpus_io.load(cfg.corpus_path)
    return _render(cfg, _estimation_report(cfg, loaded.projects))


def _cmd_predict(cfg: CommandConfig) -> str:
    return _cmd_estimate(cfg)


def _cmd_fuzzy_table(cfg: CommandConfig) -> str:
    table = _fuzzy_table(cfg)
    rows = [
        (
            level,
            karner.DEFAULT_WEIGHTS.use_case_weights[karner.classify_use_case(level)],
            table.weight(level),
        )
        for level in range(1, 11)
    ]
    report = metrics.Report(
        header=("transactions", "karner_weight", "adjusted_weight"), rows=tuple(rows)
    )
    return _render(cfg, report)


def _actuals_or_raise(projects) -> dict[str, float]:
    actuals = {}
    missing = []
    for project in projects:
        try:
            actuals[project.id] = corpus_io.actual_uucp(project)
        except ValidationError as exc:
            missing.append(str(exc))
    if missing:
        raise corpus_io.CorpusValidationError(missing)
    return actuals


def _cmd_train(cfg: CommandConfig) -> str:
    loaded = corpus_io.load(cfg.corpus_path)
    policy = TransactionPolicy(extension_weight=cfg.extension_weight)
    actuals = _actuals_or_raise(loaded.projects)
    data = [(mlp.featurize(p, policy), actuals[p.id]) for p in loaded.projects]
    train_cfg = mlp.TrainConfig(
        algorithm=cfg.algorithm,
        max_epochs=cfg.epochs,
        target_sse=cfg.target_sse,
        learning_rate=cfg.learning_rate,
        rng_seed=cfg.seed,
        hidden_width=cfg.hidden_width,
    )
    result = mlp.train(data, train_cfg)
    mlp.save_model(result.model, cfg.out_path)
    model = result.model
    return (
        f"trained {model.algorithm} on {len(data)} projects: "
        f"{model.epochs_run} epochs, final SSE {model.final_sse:.6g}\n"
        f"model written to {cfg.out_path}\n"
    )


def _cmd_evaluate(cfg: CommandConfig) -> str:
    loaded = corpus_io.load(cfg.corpus_path)
    policy = TransactionPolicy(extension_weight=cfg.extension_weight)
    actuals = _actuals_or_raise(loaded.projects)
    estimators = _estimators(cfg, policy)
    predictions = {
        name: {p.id: estimators[name](p).uucp for p in loaded.projects} for name in cfg.models
    }

    def columns_for(projects):
        return [
            metrics.ModelColumn(
                name=name,
                pairs=tuple(
                    metrics.ObservationPair(
                        project_id=p.id, actual=actuals[p.id], predicted=predictions[name][p.id]
                    )
                    for p in projects
                ),
            )
            for name in cfg.models
        ]

    baseline = cfg.models[0]
    if not cfg.by_stage:
        return _render(
            cfg, metrics.comparison_report(columns_for(loaded.projects), baseline=baseline)
        )
    reports = [
        metrics.comparison_report(
            columns_for(projects), baseline=baseline, title=_STAGE_TITLES[label]
        )
        for label, projects in corpus_io.partition_by_stage(loaded).items()
        if projects
    ]
    if not reports:
        raise ValidationError("corpus has no projects to evaluate")
    return _render(cfg, reports)


_HANDLERS = {
    "estimate": _cmd_estimate,
    "fuzzy-table": _cmd_fuzzy_table,
    "train": _cmd_train,
    "predict": _cmd_predict,
    "evaluate": _cmd_evaluate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config_from_args(args)
        text = _HANDLERS[cfg.subcommand](cfg)
        if cfg.output_path is not None:
            Path(cfg.output_path).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
    except corpus_io.CorpusParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except json.JSONDecodeError as exc:
        print(f"error: malformed JSON: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (mlp.ConvergenceError, mlp.NumericError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except karner.HighRiskTeamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
