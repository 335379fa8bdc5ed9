"""Command line interface: subcommands, exit codes, and output stability."""

import json
import subprocess
import sys

import pytest

from ucpoints import cli, karner
from ucpoints.cli import EXIT_IO, EXIT_NUMERIC, EXIT_OK, EXIT_VALIDATION, CommandConfig, main
from ucpoints.model import ValidationError


def write_json(path, payload):
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return path


def project_dict(pid, levels=(2,), actor_kinds=("simple",), env=(3,) * 8, **extra):
    body = {
        "id": pid,
        "use_cases": [
            {"name": f"uc{i}", "transactions": level} for i, level in enumerate(levels)
        ],
        "actors": [{"name": f"a{i}", "kind": kind} for i, kind in enumerate(actor_kinds)],
        "technical": [3] * 13,
        "environmental": list(env),
    }
    body.update(extra)
    return body


def corpus_payload(*projects):
    return {"format_version": 1, "description": "", "projects": list(projects)}


@pytest.fixture()
def one_project_corpus(tmp_path):
    return write_json(tmp_path / "one.json", corpus_payload(project_dict("P1")))


@pytest.fixture()
def trainable_corpus(tmp_path):
    """Twelve projects with classical-map actual sizes, so the network has an
    exactly learnable target."""
    projects = []
    level_sets = [
        (2,), (5,), (9,), (2, 5), (2, 9), (5, 9),
        (2, 5, 9), (3, 4, 8), (1, 6, 10), (2, 2, 5), (7, 9), (3, 3),
    ]
    kinds = ["simple", "average", "complex"]
    from ucpoints.model import ActorSpec, FactorRatings, ProjectSpec, UseCaseSpec

    for i, levels in enumerate(level_sets):
        actor_kinds = tuple(kinds[j % 3] for j in range(1 + i % 2))
        spec = ProjectSpec(
            id=f"S{i}",
            use_cases=tuple(
                UseCaseSpec(name=f"u{j}", transactions=lv) for j, lv in enumerate(levels)
            ),
            actors=tuple(ActorSpec(name=f"a{j}", kind=k) for j, k in enumerate(actor_kinds)),
            factors=FactorRatings.nominal(),
        )
        projects.append(
            project_dict(
                f"S{i}",
                levels=levels,
                actor_kinds=actor_kinds,
                actual_size_uucp=karner.uucp(spec),
            )
        )
    return write_json(tmp_path / "trainable.json", corpus_payload(*projects))


class TestEstimate:
    def test_minimal_csv_row(self, one_project_corpus, capsys):
        code = main(["estimate", str(one_project_corpus), "--models", "karner", "--format", "csv"])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == "project,model,uucp,tf,ef,ucp,rate,effort_ph"
        assert lines[1] == "P1,karner,6.00,1.02,0.99,6.09,20,121.79"

    def test_fuzzy_agrees_at_anchor_levels(self, tmp_path, capsys):
        corpus = write_json(
            tmp_path / "anchors.json",
            corpus_payload(project_dict("P1", levels=(2, 6, 10))),
        )
        code = main(["estimate", str(corpus), "--format", "csv"])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        karner_row = next(line for line in out.splitlines() if ",karner," in line)
        fuzzy_row = next(line for line in out.splitlines() if ",fuzzy," in line)
        assert karner_row.replace(",karner,", ",fuzzy,") == fuzzy_row

    def test_table_output_is_aligned(self, one_project_corpus, capsys):
        code = main(["estimate", str(one_project_corpus)])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert out.splitlines()[0].startswith("project")
        assert "6.09" in out

    def test_output_flag_writes_file_and_keeps_stdout_empty(
        self, one_project_corpus, tmp_path, capsys
    ):
        target = tmp_path / "report.csv"
        code = main(
            ["estimate", str(one_project_corpus), "--format", "csv", "--output", str(target)]
        )
        captured = capsys.readouterr()
        assert code == EXIT_OK
        assert captured.out == ""
        assert "P1,karner" in target.read_text()

    def test_byte_identical_across_runs(self, sample_corpus_path, capsys):
        main(["estimate", str(sample_corpus_path), "--format", "csv"])
        first = capsys.readouterr().out
        main(["estimate", str(sample_corpus_path), "--format", "csv"])
        second = capsys.readouterr().out
        assert first == second

    def test_extension_weight_changes_scenario_projects(self, sample_corpus_path, capsys):
        # P2's scenario sits at level 10 under the full weight and level 9 under
        # 0.3; the graduated weights separate those levels.
        main(["estimate", str(sample_corpus_path), "--models", "fuzzy", "--format", "csv"])
        full = capsys.readouterr().out
        main(
            [
                "estimate",
                str(sample_corpus_path),
                "--models",
                "fuzzy",
                "--format",
                "csv",
                "--extension-weight",
                "0.3",
            ]
        )
        discounted = capsys.readouterr().out
        full_p2 = next(line for line in full.splitlines() if line.startswith("P2,"))
        disc_p2 = next(line for line in discounted.splitlines() if line.startswith("P2,"))
        assert full_p2 != disc_p2
        # P1 has no scenario use cases, so its row is untouched.
        assert next(l for l in full.splitlines() if l.startswith("P1,")) == next(
            l for l in discounted.splitlines() if l.startswith("P1,")
        )

    def test_rate_karner_applies_flat_rate_everywhere(self, sample_corpus_path, capsys):
        code = main(
            ["estimate", str(sample_corpus_path), "--models", "karner", "--format", "csv", "--rate", "karner"]
        )
        out = capsys.readouterr().out
        assert code == EXIT_OK
        for line in out.splitlines()[1:]:
            assert line.split(",")[6] == "20"

    def test_high_risk_project_warns_and_omits_effort(self, sample_corpus_path, capsys):
        code = main(["estimate", str(sample_corpus_path), "--models", "karner", "--format", "csv"])
        captured = capsys.readouterr()
        assert code == EXIT_OK
        assert "P6" in captured.err and "warning" in captured.err
        p6 = next(line for line in captured.out.splitlines() if line.startswith("P6,"))
        assert p6.endswith(",,")  # no rate, no effort
        p2 = next(line for line in captured.out.splitlines() if line.startswith("P2,"))
        assert p2.split(",")[6] == "28"

    def test_force_rate_overrides_high_risk(self, sample_corpus_path, capsys):
        code = main(
            ["estimate", str(sample_corpus_path), "--models", "karner", "--format", "csv", "--force-rate"]
        )
        captured = capsys.readouterr()
        assert code == EXIT_OK
        assert captured.err == ""
        p6 = next(line for line in captured.out.splitlines() if line.startswith("P6,"))
        assert p6.split(",")[6] == "28" and not p6.endswith(",,")


class TestFuzzyTable:
    def test_default_table_csv(self, capsys):
        code = main(["fuzzy-table", "--format", "csv"])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == "transactions,karner_weight,adjusted_weight"
        assert lines[1] == "1,5,5.00"
        assert lines[4] == "4,10,7.50"
        assert lines[10] == "10,15,15.00"

    def test_custom_config_flag(self, tmp_path, capsys):
        from ucpoints import fuzzy

        config_path = tmp_path / "fuzzy.json"
        fuzzy.save_config(fuzzy.default_config(), config_path)
        main(["fuzzy-table", "--format", "csv"])
        default_out = capsys.readouterr().out
        code = main(["fuzzy-table", "--format", "csv", "--fuzzy-config", str(config_path)])
        custom_out = capsys.readouterr().out
        assert code == EXIT_OK
        assert custom_out == default_out


class TestExitCodes:
    def test_validation_failure_is_exit_1_with_no_output(self, tmp_path, capsys):
        bad = write_json(
            tmp_path / "bad.json",
            corpus_payload(project_dict("P1", env=(3,) * 7 + (7,))),
        )
        code = main(["estimate", str(bad)])
        captured = capsys.readouterr()
        assert code == EXIT_VALIDATION
        assert captured.out == ""
        assert "environmental factor F8" in captured.err

    def test_missing_file_is_exit_2(self, tmp_path, capsys):
        code = main(["estimate", str(tmp_path / "absent.json")])
        captured = capsys.readouterr()
        assert code == EXIT_IO
        assert captured.out == ""

    def test_broken_json_is_exit_2(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text('{"format_version": 1,', encoding="utf-8")
        code = main(["estimate", str(path)])
        captured = capsys.readouterr()
        assert code == EXIT_IO
        assert "line 1" in captured.err

    def test_failed_convergence_is_exit_3(self, tmp_path, capsys):
        # Two identical projects with contradictory actuals: the optimum is an
        # exact stationary point, so damping escalates past its bound.
        contradictory = write_json(
            tmp_path / "c.json",
            corpus_payload(
                project_dict("A", actual_size_uucp=50.0),
                project_dict("B", actual_size_uucp=100.0),
            ),
        )
        code = main(
            ["train", str(contradictory), "--out", str(tmp_path / "m.json"), "--epochs", "500"]
        )
        captured = capsys.readouterr()
        assert code == EXIT_NUMERIC
        assert "damping" in captured.err


class TestFlagConflicts:
    def test_mlp_needs_model_file(self, one_project_corpus, capsys):
        code = main(["estimate", str(one_project_corpus), "--models", "karner,mlp"])
        assert code == EXIT_VALIDATION
        assert "--model-file" in capsys.readouterr().err

    def test_model_file_needs_mlp(self, one_project_corpus, tmp_path, capsys):
        code = main(
            [
                "estimate",
                str(one_project_corpus),
                "--models",
                "karner",
                "--model-file",
                str(tmp_path / "m.json"),
            ]
        )
        assert code == EXIT_VALIDATION

    def test_force_rate_requires_schneider(self, one_project_corpus, capsys):
        code = main(
            ["estimate", str(one_project_corpus), "--rate", "karner", "--force-rate"]
        )
        assert code == EXIT_VALIDATION
        assert "force-rate" in capsys.readouterr().err

    def test_unknown_model_name(self, one_project_corpus, capsys):
        code = main(["estimate", str(one_project_corpus), "--models", "karner,cocomo"])
        assert code == EXIT_VALIDATION

    def test_duplicate_model_names(self, one_project_corpus, capsys):
        code = main(["estimate", str(one_project_corpus), "--models", "karner,karner"])
        assert code == EXIT_VALIDATION

    def test_command_config_direct_validation(self):
        with pytest.raises(ValidationError):
            CommandConfig(subcommand="estimate", models=("mlp",))
        with pytest.raises(ValidationError):
            CommandConfig(subcommand="estimate", extension_weight=1.5)
        with pytest.raises(ValidationError):
            CommandConfig(subcommand="estimate", output_format="xml")
        with pytest.raises(ValidationError):
            CommandConfig(subcommand="resize")


class TestTrainPredictEvaluate:
    def test_full_flow(self, trainable_corpus, tmp_path, capsys):
        model_file = tmp_path / "model.json"
        code = main(
            ["train", str(trainable_corpus), "--out", str(model_file), "--epochs", "80", "--hidden", "14"]
        )
        captured = capsys.readouterr()
        assert code == EXIT_OK
        assert model_file.exists()
        assert "model written to" in captured.out
        assert "levenberg_marquardt" in captured.out

        code = main(
            ["predict", str(trainable_corpus), "--model-file", str(model_file), "--format", "csv"]
        )
        predict_out = capsys.readouterr().out
        assert code == EXIT_OK
        assert predict_out.splitlines()[1].split(",")[1] == "mlp"

        code = main(
            [
                "evaluate",
                str(trainable_corpus),
                "--models",
                "karner,mlp",
                "--model-file",
                str(model_file),
                "--format",
                "csv",
            ]
        )
        eval_out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "improvement" in eval_out
        # The network was trained on the classical map, so its error is tiny.
        mean_line = next(line for line in eval_out.splitlines() if line.startswith("mean,"))
        mlp_mmre = float(mean_line.split(",")[7])
        assert mlp_mmre <= 0.05

    def test_backprop_algorithm_flag(self, trainable_corpus, tmp_path, capsys):
        model_file = tmp_path / "bp.json"
        code = main(
            [
                "train",
                str(trainable_corpus),
                "--out",
                str(model_file),
                "--algorithm",
                "backprop",
                "--epochs",
                "30",
            ]
        )
        captured = capsys.readouterr()
        assert code == EXIT_OK
        assert "gradient_backprop" in captured.out
        assert json.loads(model_file.read_text())["training"]["algorithm"] == "gradient_backprop"

    def test_training_is_seeded(self, trainable_corpus, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        main(["train", str(trainable_corpus), "--out", str(a), "--epochs", "20", "--seed", "9"])
        main(["train", str(trainable_corpus), "--out", str(b), "--epochs", "20", "--seed", "9"])
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()

    def test_train_requires_actuals(self, one_project_corpus, tmp_path, capsys):
        # one_project_corpus records no actual size or effort.
        extra = json.loads(one_project_corpus.read_text())
        extra["projects"].append(project_dict("P2", actual_size_uucp=30.0))
        corpus = write_json(tmp_path / "mixed.json", extra)
        code = main(["train", str(corpus), "--out", str(tmp_path / "m.json")])
        captured = capsys.readouterr()
        assert code == EXIT_VALIDATION
        assert "P1" in captured.err

    def test_evaluate_by_stage_sections(self, sample_corpus_path, capsys):
        code = main(["evaluate", str(sample_corpus_path), "--by-stage"])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "stage1 (extend/include ratio < 0.15)" in out
        assert "stage2 (extend/include ratio 0.15..0.25)" in out
        assert "stage3 (extend/include ratio > 0.25)" in out

    def test_evaluate_by_stage_csv_titles_are_comments(self, sample_corpus_path, capsys):
        code = main(["evaluate", str(sample_corpus_path), "--by-stage", "--format", "csv"])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "# stage1 (extend/include ratio < 0.15)" in out

    def test_evaluate_baseline_is_first_model(self, sample_corpus_path, capsys):
        code = main(["evaluate", str(sample_corpus_path), "--models", "fuzzy,karner", "--format", "csv"])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        improvement_line = next(line for line in out.splitlines() if line.startswith("improvement"))
        cells = improvement_line.split(",")
        assert cells[3] == "" and cells[7] != ""  # fuzzy block blank, karner carries points


class TestModuleEntry:
    def test_python_dash_m_invocation(self, one_project_corpus):
        result = subprocess.run(
            [
                sys.executable,
                "-m",
                "ucpoints.cli",
                "estimate",
                str(one_project_corpus),
                "--format",
                "csv",
            ],
            capture_output=True,
            text=True,
        )
        assert result.returncode == EXIT_OK
        assert result.stdout.splitlines()[1].startswith("P1,karner,6.00")

    def test_help_lists_subcommands(self):
        parser = cli.build_parser()
        help_text = parser.format_help()
        for name in ("estimate", "fuzzy-table", "train", "predict", "evaluate"):
            assert name in help_text
