"""
Timing utilities for pipeline stages.
"""

import time
from collections.abc import Callable
from functools import wraps
from typing import Any, TypeVar

from ..logger import logger

F = TypeVar("F", bound=Callable[..., Any])


def measure_time(func: F) -> F:
    """Decorator to log a function's wall time, and failures with their cost."""

    @wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        start_time = time.perf_counter()
        try:
            result = func(*args, **kwargs)
            execution_time = time.perf_counter() - start_time
            logger.debug(f"{func.__qualname__} executed in {execution_time:.4f} seconds")
            return result
        except Exception as e:
            execution_time = time.perf_counter() - start_time
            logger.error(
                f"{func.__qualname__} failed after {execution_time:.4f} seconds: {e}"
            )
            raise

    return wrapper  # type: ignore[return-value]


class StageTimer:
    """Accumulates wall time per pipeline stage."""

    def __init__(self):
        self.durations: dict[str, float] = {}
        self._started: dict[str, float] = {}

    def start(self, stage: str) -> None:
        self._started[stage] = time.perf_counter()

    def stop(self, stage: str) -> float:
        """Stop timing ``stage`` and return the elapsed seconds (0 if never started)."""
        started = self._started.pop(stage, None)
        if started is None:
            return 0.0
        duration = time.perf_counter() - started
        self.durations[stage] = self.durations.get(stage, 0.0) + duration
        return duration

    def summary(self) -> str:
        """One ``stage=seconds`` pair per stage in execution order."""
        return ", ".join(f"{stage}={seconds:.2f}s" for stage, seconds in self.durations.items())
