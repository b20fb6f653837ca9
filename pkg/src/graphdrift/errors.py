"""Exception types shared across the package."""


class GraphDriftError(Exception):
    """Base class for all graphdrift errors."""


class InvalidEventError(GraphDriftError):
    """An edge event cannot be applied to the current graph state."""


class EventLogError(GraphDriftError):
    """Malformed or inconsistent event-log input."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class PushDivergenceError(GraphDriftError):
    """The push loop exceeded its mass-transfer cap (pathological input)."""


class InternalInconsistencyError(GraphDriftError):
    """An internal invariant was violated; indicates a caller or engine bug."""


class OracleSizeError(GraphDriftError):
    """The dense solver was asked for a graph above its node-count cap."""


class IncompatibleEmbeddingError(GraphDriftError):
    """Two embeddings with different dimension or hash seed were combined."""


class ScoringError(GraphDriftError):
    """Aggregation over an empty node or seed set."""
