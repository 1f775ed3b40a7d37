"""Shared exception for failures inside the rate-evaluation pipeline."""

from __future__ import annotations

__all__ = ["PipelineError"]


class PipelineError(RuntimeError):
    """A numerical stage of the pipeline failed (factorisation, reduction,
    or a violated report invariant).  ``stage`` names the failing step."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"{stage}: {message}")
        self.stage = stage
