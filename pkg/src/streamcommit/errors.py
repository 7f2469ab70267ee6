"""Exception types raised by streamcommit."""

from __future__ import annotations


class StreamCommitError(Exception):
    """Base class for all package errors."""


class InvalidAudioError(StreamCommitError, ValueError):
    """Audio chunk is empty or holds non-finite samples."""


class ConfigError(StreamCommitError, ValueError):
    """Engine configuration field is unknown or out of range."""


class DisambiguationError(StreamCommitError, LookupError):
    """Boundary word could not be located in the hypothesis."""


class TraceFormatError(StreamCommitError, ValueError):
    """Trace or event file is malformed."""


class UndefinedMetricError(StreamCommitError, ValueError):
    """Metric has no defined value for the given inputs."""


class DataIntegrityError(StreamCommitError, ValueError):
    """Event log violates a structural invariant (e.g. negative latency)."""
