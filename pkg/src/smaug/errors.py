"""Exception types raised by the engine."""


class SmaugError(Exception):
    """Base class for all engine errors."""


class MalformedDocument(SmaugError):
    """A document does not follow the expected line syntax."""


class SchemaViolation(SmaugError):
    """A field is missing or out of range."""

    def __init__(self, field: str, record: int, detail: str = ""):
        self.field = field
        self.record = record
        msg = f"schema violation: field {field!r}, record {record}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class InconsistentStream(SmaugError):
    """A pointer reappears after its final up event without a new down."""


class UnterminatedStroke(SmaugError):
    """A down event has no matching up event before stream end."""


class EmptyFusion(SmaugError):
    """Motion fusion produced zero pairs."""


class EmptySequence(SmaugError):
    """DTW input sequence is empty."""


class EmptyTouch(SmaugError):
    """A trace contains no touch events."""


class StrokeCountMismatch(SmaugError):
    """Enrollment rounds disagree on the number of strokes."""

    def __init__(self, round_: int, expected: int, got: int):
        self.round = round_
        self.expected = expected
        self.got = got
        super().__init__(
            f"round {round_} has {got} strokes, expected {expected}"
        )


class InsufficientRounds(SmaugError):
    """Fewer enrollment traces than the configured round count."""


class EmptyRegistry(SmaugError):
    """No gestures registered for this user."""


class NotFound(SmaugError):
    """Record or resource does not exist."""


class VersionMismatch(SmaugError):
    """Document carries an unsupported format version."""


class CorruptRecord(SmaugError):
    """Stored record fails its checksum."""
