"""Exception hierarchy shared across the package."""


class DepthscopeError(Exception):
    """Base class for all errors raised by this package."""


class IngestError(DepthscopeError):
    """Malformed input data: schema mismatches, unknown categories, ragged rows."""


class AnalysisError(DepthscopeError):
    """A pipeline stage failed on otherwise valid data."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"{stage}: {message}")
        self.stage = stage
