"""Exception hierarchy."""

from __future__ import annotations

__all__ = [
    "RefineError",
    "GeometryError",
    "FormatError",
    "GoldenReplayFailed",
    "EngineError",
]


class RefineError(Exception):
    """Base class for every error raised by this package."""


class GeometryError(RefineError):
    """A propagation or network geometry is invalid or inconsistent."""


class FormatError(RefineError):
    """A shared-format file (field, hologram, manifest) cannot be decoded."""


class GoldenReplayFailed(RefineError):
    """The differentiable layer disagreed with the reference golden vectors."""


class EngineError(RefineError):
    """An invocation of the reference engine CLI failed."""
