"""Exception types shared across the toolkit."""


class LodegenError(Exception):
    """Base class for all toolkit errors."""


class FormatError(LodegenError):
    """Malformed level text (ragged lines, empty input)."""


class SymbolError(LodegenError):
    """Unknown tile symbol; carries the offending position."""

    def __init__(self, symbol, x, y):
        super().__init__(f"unknown tile symbol {symbol!r} at column {x}, row {y}")
        self.symbol = symbol
        self.x = x
        self.y = y


class TraceError(LodegenError):
    """Coordinate trace with a non-adjacent step."""


class BoundsError(LodegenError):
    """Path trace leaves the target grid."""


class CorpusError(LodegenError):
    """Training corpus is empty or yields no usable data."""


class NumericsError(LodegenError):
    """Non-finite value encountered during network evaluation."""


class ShapeError(LodegenError):
    """Array shapes disagree."""


class ConfigError(LodegenError):
    """Invalid training or generation configuration."""


class AlignmentError(LodegenError):
    """Levels and paths are not aligned 1:1."""


class StructureError(LodegenError):
    """Level violates a structural precondition (e.g. spawn count != 1)."""


class InputError(LodegenError):
    """Invalid input to a statistical routine."""


class SolveError(LodegenError):
    """No gold reachable when synthesizing a path."""
