"""
Use cases for FacadeLens.
"""

from .pipeline import PipelineResult, RunPipelineUseCase
from .stages import (
    DedupUseCase,
    EvaluateUseCase,
    IngestUseCase,
    SplitUseCase,
    SynthesizeCorpusUseCase,
    TrainUseCase,
)

__all__ = [
    "SynthesizeCorpusUseCase",
    "IngestUseCase",
    "DedupUseCase",
    "SplitUseCase",
    "TrainUseCase",
    "EvaluateUseCase",
    "RunPipelineUseCase",
    "PipelineResult",
]
