"""Exception hierarchy shared by every symtrack module."""


class SymtrackError(Exception):
    """Base class for all errors raised by symtrack."""


class ValidationError(SymtrackError, ValueError):
    """A value violates the invariants of its type."""


class EmptyScore(ValidationError):
    pass


class NonIncreasingOnsets(ValidationError):
    pass


class EmptyPitchSet(ValidationError):
    pass


class ParseError(SymtrackError):
    """Input could not be parsed.

    ``line`` is the 1-based line number for text inputs, or ``None``.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnsupportedDivision(ParseError):
    """MIDI file uses SMPTE time division instead of ticks per quarter."""


class OutOfOrderInput(SymtrackError):
    pass


class SessionEnded(SymtrackError):
    """The score is exhausted and the tracker cannot consume further notes."""


class NoMatchYet(SymtrackError):
    pass


class NoMatches(SymtrackError):
    pass


class DegenerateTempoCurve(ValidationError):
    pass


class SinkClosed(SymtrackError):
    """Raised by (or on behalf of) a replay sink that no longer accepts notes."""
