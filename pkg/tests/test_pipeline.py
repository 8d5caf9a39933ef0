"""
End-to-end tests of the cached stage pipeline.
"""

import pytest

from facadelens.config import PipelineConfig
from facadelens.exceptions import StageError
from facadelens.factories import create_pipeline
from facadelens.models.training import TrainConfig
from facadelens.repositories.jsonl_manifest import JsonlManifestRepository
from facadelens.services.evaluation import read_report
from facadelens.use_cases import stages
from facadelens.use_cases.pipeline import STAGES


def _config(workdir, **kwargs) -> PipelineConfig:
    return PipelineConfig(
        workdir=str(workdir),
        n_properties=30,
        seed=2,
        train=TrainConfig(epochs=1, batch_size=8, seed=2),
        **kwargs,
    )


@pytest.mark.slow
@pytest.mark.integration
class TestRunPipeline:
    """Test running, caching and invalidating stages."""

    def test_run_then_cached(self, tmp_path):
        """A second run with nothing changed skips every stage."""
        config = _config(tmp_path / "work")
        pipeline = create_pipeline(config.dedup_threshold)

        first = pipeline.execute(config)
        assert first.executed == list(STAGES)
        assert first.skipped == []

        report = read_report(config.stage_dir("eval") / stages.REPORT)
        assert report.n_images > 0
        for stage in STAGES:
            assert (config.stage_dir(stage) / ".stamp.json").exists()
            assert (config.stage_dir(stage) / "resolved_config.yaml").exists()

        second = pipeline.execute(config)
        assert second.executed == []
        assert second.skipped == list(STAGES)

    def test_edited_manifest_invalidates_downstream(self, tmp_path):
        """Corrupting a synthesized manifest re-runs ingest and everything after."""
        config = _config(tmp_path / "work")
        pipeline = create_pipeline(config.dedup_threshold)
        pipeline.execute(config)

        manifest = config.stage_dir("synth") / stages.PROPERTIES
        lines = manifest.read_text().splitlines()
        manifest.write_text("\n".join(["{not json", *lines[1:]]) + "\n")

        result = pipeline.execute(config)

        assert result.skipped == ["synth"]
        assert result.executed == ["ingest", "dedup", "split", "train", "eval"]
        rejections = (config.stage_dir("ingest") / stages.REJECTIONS).read_text()
        assert "malformed_line" in rejections

    def test_changed_parameter_reruns_from_that_stage(self, tmp_path):
        """A new split seed leaves the earlier stages cached."""
        config = _config(tmp_path / "work")
        pipeline = create_pipeline(config.dedup_threshold)
        pipeline.execute(config, only=["synth", "ingest", "dedup", "split"])

        config.train_fraction = 0.7
        result = pipeline.execute(config, only=["synth", "ingest", "dedup", "split"])

        assert result.skipped == ["synth", "ingest", "dedup"]
        assert result.executed == ["split"]

    def test_force(self, tmp_path):
        """force ignores stamps."""
        config = _config(tmp_path / "work")
        pipeline = create_pipeline(config.dedup_threshold)
        pipeline.execute(config, only=["synth", "ingest"])

        result = pipeline.execute(config, only=["synth", "ingest"], force=True)
        assert result.executed == ["synth", "ingest"]

    def test_changed_image_retrains(self, tmp_path):
        """New pixels behind an unchanged labeled manifest re-run train."""
        config = _config(tmp_path / "work")
        pipeline = create_pipeline(config.dedup_threshold)
        only = ["synth", "ingest", "dedup", "split", "train"]
        pipeline.execute(config, only=only)

        labeled = JsonlManifestRepository().load_labeled(
            config.stage_dir("split") / stages.LABELED
        )
        target = labeled[0]
        donor = next(s for s in labeled if s.property_id != target.property_id)
        target.path.write_bytes(donor.path.read_bytes())

        result = pipeline.execute(config, only=only)

        assert "train" in result.executed
        assert result.skipped[:2] == ["synth", "ingest"]

    def test_reproducible_across_workdirs(self, tmp_path):
        """Same configuration in two directories gives identical artifacts."""
        artifacts = [
            ("split", stages.SPLIT),
            ("train", stages.LOSS_TRACE),
            ("eval", stages.REPORT),
        ]
        outputs = []
        for name in ("a", "b"):
            config = _config(tmp_path / name)
            create_pipeline(config.dedup_threshold).execute(config)
            outputs.append(
                [(config.stage_dir(stage) / file).read_bytes() for stage, file in artifacts]
            )
        for (stage, _), first, second in zip(artifacts, outputs[0], outputs[1], strict=True):
            assert first == second, stage


@pytest.mark.slow
@pytest.mark.integration
class TestLearnability:
    """Test that the compact model learns the synthetic cues."""

    def test_reaches_thresholds(self, tmp_path):
        """2,000 clean properties, 20 epochs at 1e-3: all four heads clear their bars."""
        config = PipelineConfig(
            workdir=str(tmp_path / "work"),
            n_properties=2000,
            cue_strength=1.0,
            seed=0,
            train=TrainConfig(learning_rate=1e-3, epochs=20, batch_size=32, seed=0),
        )
        create_pipeline(config.dedup_threshold).execute(config)

        report = read_report(config.stage_dir("eval") / stages.REPORT)
        assert report.structure.accuracy >= 0.90
        assert report.ptype.accuracy >= 0.90
        assert report.fireproof.accuracy >= 0.90
        assert report.regression.mae <= 5.0


class TestPipelineErrors:
    """Test pipeline argument errors."""

    def test_unknown_stage(self, tmp_path):
        """Stage names are checked before anything runs."""
        config = _config(tmp_path / "work")
        with pytest.raises(StageError):
            create_pipeline().execute(config, only=["synth", "deploy"])
        assert not (tmp_path / "work").exists()
