"""Shared exception types."""


class ScoreloopError(Exception):
    """Base class for all errors raised by this package."""


class DataError(ScoreloopError):
    """Bad input data: missing files, schema violations, malformed cells."""


class ModelError(ScoreloopError):
    """Model-level failures: dimension mismatches, bad documents, version skew."""


class IntegrityError(ScoreloopError):
    """On-disk state failed a checksum or structural check."""

    def __init__(self, message: str, path: str | None = None):
        super().__init__(message)
        self.path = path


class RetrainInProgressError(ScoreloopError):
    """A retrain is already holding the writer slot."""
