"""
Logging configuration for FacadeLens.
"""

import logging
import sys
from collections import Counter
from collections.abc import Iterable
from pathlib import Path

from .config import config
from .models.records import Rejection


class PipelineLogger:
    """Logging wrapper with helpers for stage and rejection reporting."""

    def __init__(self, name: str, log_level: str = "INFO", log_dir: str | None = None):
        self.logger = logging.getLogger(name)
        self.logger.setLevel(getattr(logging, log_level.upper(), logging.INFO))
        self.log_dir = log_dir

        # Prevent duplicate handlers
        if not self.logger.handlers:
            self._setup_handlers()

    def _setup_handlers(self):
        """Set up logging handlers."""
        formatter = logging.Formatter(
            "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
        )

        # Console handler
        console_handler = logging.StreamHandler(sys.stdout)
        console_handler.setLevel(logging.INFO)
        console_handler.setFormatter(formatter)
        self.logger.addHandler(console_handler)

        # File handler
        if self.log_dir:
            log_dir = Path(self.log_dir)
            log_dir.mkdir(parents=True, exist_ok=True)
            file_handler = logging.FileHandler(log_dir / "facadelens.log")
            file_handler.setLevel(logging.DEBUG)
            file_handler.setFormatter(formatter)
            self.logger.addHandler(file_handler)

    def debug(self, message: str, *args, **kwargs):
        self.logger.debug(message, *args, **kwargs)

    def info(self, message: str, *args, **kwargs):
        self.logger.info(message, *args, **kwargs)

    def warning(self, message: str, *args, **kwargs):
        self.logger.warning(message, *args, **kwargs)

    def error(self, message: str, *args, **kwargs):
        self.logger.error(message, *args, **kwargs)

    def critical(self, message: str, *args, **kwargs):
        self.logger.critical(message, *args, **kwargs)

    def log_stage_start(self, stage: str, detail: str = ""):
        """Log that a pipeline stage begins."""
        suffix = f": {detail}" if detail else ""
        self.info(f"[{stage}] starting{suffix}")

    def log_stage_skip(self, stage: str):
        """Log that a stage was skipped because its stamp matched."""
        self.info(f"[{stage}] up to date, skipped")

    def log_stage_done(self, stage: str, summary: str = ""):
        """Log that a stage finished."""
        suffix = f": {summary}" if summary else ""
        self.info(f"[{stage}] done{suffix}")

    def log_rejections(self, stage: str, rejections: Iterable[Rejection]):
        """Log rejection counts per reason."""
        counts = Counter(r.reason for r in rejections)
        if not counts:
            self.info(f"[{stage}] no rejections")
            return
        breakdown = ", ".join(f"{reason}={n}" for reason, n in sorted(counts.items()))
        self.info(f"[{stage}] rejected {sum(counts.values())} ({breakdown})")


# Global logger instance
logger = PipelineLogger("facadelens", config.LOG_LEVEL or "INFO", config.LOG_DIR)
