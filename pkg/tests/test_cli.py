"""
Tests for CLI module.
"""

import json
from unittest.mock import patch

import pytest

from facadelens.cli import build_parser, run
from facadelens.cli.commands import parse_rates
from facadelens.exceptions import ConfigurationError
from facadelens.use_cases import stages
from facadelens.use_cases.pipeline import PipelineResult


class TestParser:
    """Test argument parsing."""

    def test_subcommands(self):
        """Every command is registered."""
        parser = build_parser()
        for command in (
            "synth",
            "ingest",
            "dedup",
            "split",
            "train",
            "eval",
            "predict",
            "pipeline",
            "compare-lr",
            "report",
        ):
            extra = ["--ckpt", "m", "--image", "i"] if command == "predict" else []
            extra = ["--report", "r"] if command == "report" else extra
            assert build_parser().parse_args([command, *extra]).command == command
        assert parser.prog == "facadelens"

    def test_flags_default_to_unset(self):
        """Flags not given stay None so the config file applies."""
        args = build_parser().parse_args(["synth"])
        assert args.n_properties is None
        assert args.seed is None
        assert args.workdir is None

    def test_help_shows_defaults(self, capsys):
        """Help text names configuration defaults."""
        with pytest.raises(SystemExit) as exc_info:
            build_parser().parse_args(["synth", "--help"])
        assert exc_info.value.code == 0
        out = capsys.readouterr().out
        assert "(default: 2000)" in out
        assert "default: None" not in out

    def test_missing_required(self):
        """predict needs a checkpoint and an image."""
        with pytest.raises(SystemExit) as exc_info:
            build_parser().parse_args(["predict", "--ckpt", "m"])
        assert exc_info.value.code == 2

    def test_dedup_interface(self):
        """dedup takes the image manifest, a threshold and an output manifest."""
        args = build_parser().parse_args(
            ["dedup", "--images", "in.jsonl", "--threshold", "10", "--out", "kept.jsonl"]
        )
        assert args.images == "in.jsonl"
        assert args.threshold == 10
        assert args.out == "kept.jsonl"

        legacy = build_parser().parse_args(["dedup", "--manifest", "in.jsonl"])
        assert legacy.images == "in.jsonl"

    def test_pipeline_help_shows_defaults(self, capsys):
        """Every pipeline data flag documents its default."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["pipeline", "--help"])
        out = " ".join(capsys.readouterr().out.split())
        for flag, default in (
            ("--n-properties", "2000"),
            ("--cue-strength", "1.0"),
            ("--threshold", "10"),
            ("--train-fraction", "0.8"),
        ):
            assert flag in out
            assert f"(default: {default})" in out

    def test_no_command(self):
        """A command is required."""
        with pytest.raises(SystemExit) as exc_info:
            run([])
        assert exc_info.value.code == 2


class TestParseRates:
    """Test learning-rate arguments."""

    def test_presets(self):
        """Named presets expand to pairs."""
        assert parse_rates("pretrained") == (1e-5, 1e-6)
        assert parse_rates("compact") == (1e-3, 1e-4)

    def test_list(self):
        """Comma-separated rates are parsed in order."""
        assert parse_rates("0.01, 0.001") == (0.01, 0.001)

    @pytest.mark.parametrize("text", ["", "abc", "0.1,-1", "0"])
    def test_invalid(self, text):
        """Non-numeric or non-positive rates are rejected."""
        with pytest.raises(ConfigurationError):
            parse_rates(text)


class TestRun:
    """Test command dispatch and exit status."""

    @patch("facadelens.cli.main.logger")
    @patch("facadelens.cli.commands.synth_command")
    def test_domain_error_exits_one(self, mock_command, mock_logger):
        """Errors from the pipeline become exit status 1 and a log line."""
        mock_command.side_effect = ConfigurationError("bad value", "seed")

        assert run(["synth"]) == 1
        mock_logger.error.assert_called_once()
        assert "synth failed" in mock_logger.error.call_args[0][0]

    @patch("facadelens.cli.commands.synth_command")
    def test_success_exits_zero(self, mock_command):
        """The command's status is returned."""
        mock_command.return_value = 0
        assert run(["synth", "--seed", "3"]) == 0
        assert mock_command.call_args[0][0].seed == 3

    def test_invalid_config_value(self, tmp_path):
        """Invalid flag values fail validation with status 1."""
        assert run(["synth", "--workdir", str(tmp_path), "--cue-strength", "2"]) == 1

    @patch("facadelens.cli.commands.create_pipeline")
    def test_pipeline_flags_override_config(self, mock_create, tmp_path):
        """Threshold and train fraction flags reach the pipeline configuration."""
        mock_create.return_value.execute.return_value = PipelineResult()
        config_file = tmp_path / "run.yaml"
        config_file.write_text("dedup_threshold: 4\ntrain_fraction: 0.6\n")

        status = run(
            [
                "pipeline",
                "--config",
                str(config_file),
                "--threshold",
                "7",
                "--train-fraction",
                "0.75",
            ]
        )

        assert status == 0
        assert mock_create.call_args[0][0] == 7
        config = mock_create.return_value.execute.call_args[0][0]
        assert config.dedup_threshold == 7
        assert config.train_fraction == 0.75

    def test_report_missing_file(self, tmp_path):
        """Reading a missing report fails with status 1."""
        assert run(["report", "--report", str(tmp_path / "none.jsonl")]) == 1


@pytest.mark.integration
class TestStageCommands:
    """Test the data stages end to end through the CLI."""

    def test_synth_to_split(self, tmp_path):
        """synth, ingest, dedup and split chain through the work directory."""
        workdir = str(tmp_path / "work")
        common = ["--workdir", workdir]

        assert run(["synth", *common, "--n-properties", "12", "--seed", "1"]) == 0
        assert run(["ingest", *common]) == 0
        assert run(["dedup", *common]) == 0
        assert run(["split", *common, "--seed", "1"]) == 0

        work = tmp_path / "work"
        for stage, name in (
            ("synth", stages.PROPERTIES),
            ("ingest", stages.CORPUS_STATS),
            ("dedup", stages.HASHES),
            ("split", stages.LABELED),
        ):
            assert (work / stage / name).exists()
            assert (work / stage / "resolved_config.yaml").exists()

        stats = json.loads((work / "ingest" / stages.CORPUS_STATS).read_text())
        assert stats["n_properties"] == 12

        split_lines = (work / "split" / stages.SPLIT).read_text().splitlines()
        assert len(split_lines) == 12

    def test_dedup_to_named_manifest(self, tmp_path):
        """dedup --out FILE.jsonl writes that manifest and its side files beside it."""
        workdir = str(tmp_path / "work")
        assert run(["synth", "--workdir", workdir, "--n-properties", "6"]) == 0
        assert run(["ingest", "--workdir", workdir]) == 0

        kept = tmp_path / "kept" / "retained.jsonl"
        status = run(
            [
                "dedup",
                "--workdir",
                workdir,
                "--images",
                str(tmp_path / "work" / "ingest" / stages.IMAGES),
                "--threshold",
                "10",
                "--out",
                str(kept),
            ]
        )

        assert status == 0
        assert kept.exists()
        assert (kept.parent / stages.HASHES).exists()
        assert not (kept.parent / stages.IMAGES).exists()
