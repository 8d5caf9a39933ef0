"""
Configuration module for FacadeLens.
"""

import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

import yaml
from dotenv import load_dotenv

from .exceptions.validation import ConfigurationError
from .models.training import TrainConfig

# Load environment variables
load_dotenv()


class Config:
    """Process-level settings read from the environment."""

    def __init__(self):
        """Initialize configuration with environment variables."""
        self._load_config()

    def _load_config(self) -> None:
        """Load all configuration values from environment variables."""
        # Logging configuration
        self.LOG_LEVEL = self._get_env("FACADELENS_LOG_LEVEL", "INFO")
        self.LOG_DIR = self._get_env("FACADELENS_LOG_DIR", "logs")

        # Pipeline defaults
        self.WORKDIR = self._get_env("FACADELENS_WORKDIR", "work")
        self.SEED = self._get_int("FACADELENS_SEED", 0)
        self.DEVICE = self._get_env("FACADELENS_DEVICE", "cpu")

    def _get_env(self, key: str, default: str | None = None) -> str | None:
        """Get environment variable with optional default."""
        return os.getenv(key, default)

    def _get_int(self, key: str, default: int) -> int:
        """Get integer environment variable."""
        try:
            return int(os.getenv(key, str(default)))
        except ValueError:
            return default

    def validate(self) -> list[str]:
        """Validate configuration and return list of errors."""
        errors = []

        if (self.LOG_LEVEL or "").upper() not in (
            "DEBUG",
            "INFO",
            "WARNING",
            "ERROR",
            "CRITICAL",
        ):
            errors.append(f"FACADELENS_LOG_LEVEL is not a log level: {self.LOG_LEVEL}")

        if self.DEVICE not in ("cpu", "cuda", "mps"):
            errors.append(f"FACADELENS_DEVICE must be cpu, cuda or mps: {self.DEVICE}")

        return errors

    def validate_and_raise(self) -> None:
        """Validate configuration and raise exception if invalid."""
        errors = self.validate()
        if errors:
            raise ConfigurationError(
                "Configuration validation failed: " + "; ".join(errors)
            )

    def to_dict(self) -> dict[str, Any]:
        """Convert configuration to dictionary."""
        return {
            "log_level": self.LOG_LEVEL,
            "log_dir": self.LOG_DIR,
            "workdir": self.WORKDIR,
            "seed": self.SEED,
            "device": self.DEVICE,
        }


@dataclass
class PipelineConfig:
    """Every knob of a pipeline run; serializable to a single YAML file.

    Stage directories live under ``workdir`` unless overridden.
    """

    workdir: str = "work"
    seed: int = 0

    # synth
    n_properties: int = 2000
    images_per_property_min: int = 1
    images_per_property_max: int = 3
    cue_strength: float = 1.0
    year_min: int = 1915
    year_max: int = 2025

    # dedup / split
    dedup_threshold: int = 10
    train_fraction: float = 0.8

    # train
    train: TrainConfig = field(default_factory=TrainConfig)

    # external inputs; when unset the pipeline synthesizes a corpus
    properties_manifest: str | None = None
    images_manifest: str | None = None

    def stage_dir(self, stage: str) -> Path:
        """Output directory of one stage."""
        return Path(self.workdir) / stage

    def validate(self) -> list[tuple[str, str]]:
        """Return (field, message) pairs for every invalid value."""
        errors: list[tuple[str, str]] = []
        if self.n_properties < 1:
            errors.append(("n_properties", "must be >= 1"))
        if not 1 <= self.images_per_property_min <= self.images_per_property_max:
            errors.append(
                (
                    "images_per_property_min",
                    "need 1 <= images_per_property_min <= images_per_property_max",
                )
            )
        if not 0.0 <= self.cue_strength <= 1.0:
            errors.append(("cue_strength", "must be in [0, 1]"))
        if not 1915 <= self.year_min <= self.year_max <= 2025:
            errors.append(("year_min", "year range must lie within [1915, 2025]"))
        if not 0 <= self.dedup_threshold <= 64:
            errors.append(("dedup_threshold", "must be in [0, 64]"))
        if not 0.0 < self.train_fraction < 1.0:
            errors.append(("train_fraction", "must be in (0, 1)"))
        if (self.properties_manifest is None) != (self.images_manifest is None):
            errors.append(
                (
                    "properties_manifest",
                    "properties_manifest and images_manifest must be given together",
                )
            )
        errors.extend(("train", message) for message in self.train.validate())
        return errors

    def validate_and_raise(self) -> None:
        """Raise ConfigurationError naming the first invalid field."""
        errors = self.validate()
        if errors:
            field_name, _ = errors[0]
            raise ConfigurationError(
                "Invalid pipeline configuration: "
                + "; ".join(f"{f}: {m}" for f, m in errors),
                field_name,
            )

    def to_dict(self) -> dict[str, Any]:
        """Convert to a plain dictionary."""
        return asdict(self)

    def to_yaml(self) -> str:
        """Render the fully resolved configuration."""
        return yaml.safe_dump(self.to_dict(), sort_keys=True)

    def write(self, directory: Path) -> Path:
        """Echo the resolved configuration into ``directory``."""
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / "resolved_config.yaml"
        path.write_text(self.to_yaml(), encoding="utf-8")
        return path

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "PipelineConfig":
        """Create PipelineConfig from a (possibly partial) dictionary."""
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(
                f"Unknown configuration keys: {', '.join(sorted(unknown))}",
                sorted(unknown)[0],
            )

        values = dict(data)
        train_data = values.pop("train", None) or {}
        train_known = {f.name for f in fields(TrainConfig)}
        unknown_train = set(train_data) - train_known
        if unknown_train:
            raise ConfigurationError(
                f"Unknown train keys: {', '.join(sorted(unknown_train))}",
                "train." + sorted(unknown_train)[0],
            )
        return cls(train=TrainConfig(**train_data), **values)

    @classmethod
    def load(cls, path: Path | str | None) -> "PipelineConfig":
        """Load from a YAML file, or return defaults when ``path`` is None."""
        if path is None:
            return cls(
                workdir=config.WORKDIR or "work",
                seed=config.SEED,
                train=TrainConfig(seed=config.SEED, device=config.DEVICE or "cpu"),
            )

        config_path = Path(path)
        try:
            data = yaml.safe_load(config_path.read_text(encoding="utf-8")) or {}
        except OSError as e:
            raise ConfigurationError(f"Cannot read config file {config_path}: {e}") from e
        except yaml.YAMLError as e:
            raise ConfigurationError(f"Invalid YAML in {config_path}: {e}") from e

        if not isinstance(data, dict):
            raise ConfigurationError(f"Config file {config_path} must hold a mapping")
        return cls.from_dict(data)

    def with_overrides(self, overrides: dict[str, Any]) -> "PipelineConfig":
        """Apply explicitly given values; ``None`` means "not given".

        Keys prefixed with ``train.`` address TrainConfig fields.
        """
        data = self.to_dict()
        for key, value in overrides.items():
            if value is None:
                continue
            if key.startswith("train."):
                data["train"][key.removeprefix("train.")] = value
            else:
                data[key] = value
        return PipelineConfig.from_dict(data)


# Global configuration instance
config = Config()
