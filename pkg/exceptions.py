"""
Error taxonomy shared by all pipeline stages.
Each class maps onto one CLI exit code (see main.py).
"""

from typing import Optional, Tuple


class EigenPortError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgumentError(EigenPortError, ValueError):
    """A parameter or constructed object violates its documented contract."""


class GraphFormatError(EigenPortError, ValueError):
    """Malformed graph input. Carries the 1-based line number when known."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class InvalidGraphError(EigenPortError):
    """A well-formed graph the pipeline cannot use (for example a single node)."""


class DisconnectedGraphError(EigenPortError):
    """The pipeline requires a connected graph."""

    def __init__(self, component_count: int):
        self.component_count = component_count
        super().__init__(f"graph is disconnected ({component_count} components)")


class TransportError(EigenPortError):
    """Base for balance-equation LP failures."""

    def __init__(self, message: str, pair: Optional[Tuple[int, int]] = None, stats: Optional[dict] = None):
        self.pair = pair
        self.stats = stats or {}
        if pair is not None:
            message = f"pair ({pair[0]}, {pair[1]}): {message}"
        super().__init__(message)

    def with_pair(self, pair: Tuple[int, int]) -> "TransportError":
        """Return a copy of this error annotated with the offending pmf pair."""
        return type(self)(str(self), pair=pair, stats=self.stats)


class InfeasibleTransportError(TransportError):
    """No nonnegative flow satisfies the balance equation."""


class TransportNumericError(TransportError):
    """The solver did not converge or the residual bound was violated."""


class EmbeddingDimensionError(EigenPortError):
    """A coordinate-bearing Gram eigenvalue is negative."""


class UnsupportedDimensionError(EigenPortError, ValueError):
    """Scatter rendering supports at most three embedding dimensions."""
