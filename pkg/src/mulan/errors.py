"""Exception hierarchy shared by all mulan modules.

The CLI maps these onto exit codes: ParseError and plain I/O failures are
exit 1, ValidationError (and subclasses) exit 2, anything else exit 3.
"""


class MulanError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(MulanError):
    """A file could not be parsed. Carries the offending line number."""

    def __init__(self, path, line_no, reason):
        self.path = str(path)
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"{self.path}:{line_no}: {reason}")


class ValidationError(MulanError):
    """Input is well-formed but violates a structural constraint."""


class UnknownNode(ValidationError):
    """A referenced node does not exist in the given layer."""


class DuplicateSeed(ValidationError):
    """The same seed pair was supplied more than once."""


class LayerMismatch(ValidationError):
    """The two networks being aligned have different layer counts."""


class InvalidSpec(ValidationError):
    """A generator or noise specification is out of range."""


class EmptyGraph(ValidationError):
    """Community detection or modularity was asked for a weightless graph."""


class EmptyTruth(ValidationError):
    """F-NC requires a non-empty true mapping for the layer."""


class SingleLayer(ValidationError):
    """The inter-layer metric needs at least two layers."""
