"""Exception taxonomy. CLI exit codes: config 2, trace/scene 3, protocol 4."""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all engine-raised errors."""


class ConfigError(EngineError):
    """Invalid configuration (bad value, violated layout bound, ...)."""


class TraceError(EngineError):
    """Malformed or inconsistent event stream."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SceneError(EngineError):
    """Event references an unknown screen, layer or item."""


class ProtocolError(EngineError):
    """Live-session protocol violation (version mismatch, bad message)."""


class CapacityError(EngineError):
    """Requested arrangement exceeds available space."""

    def __init__(self, message: str, max_supported: int):
        self.max_supported = max_supported
        super().__init__(message)
