"""Exception hierarchy shared by all modules."""


class CommCalcError(Exception):
    """Base class for every error raised by this package."""


class WordSyntaxError(CommCalcError, ValueError):
    def __init__(self, message, text="", position=0):
        self.text = text
        self.position = position
        if text:
            message = f"{message} at position {position}: {text!r}"
        super().__init__(message)


class RankError(CommCalcError, ValueError):
    """Generator index out of range, or operands living in different ranks."""


class WordTooLong(CommCalcError):
    pass


class UnboundVariable(CommCalcError, KeyError):
    pass


class ResourceLimit(CommCalcError):
    """A configurable size cap (basis, instantiation, class) was exceeded."""


class InconsistentSystem(CommCalcError):
    """A leading-part linear system had no integer solution.

    For genuine group elements this cannot happen, so seeing it means a bug.
    """


class Indeterminate(CommCalcError):
    """The requested quantity is not determined by the available invariants."""


class SpanNotStabilized(CommCalcError):
    pass
