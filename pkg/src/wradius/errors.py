"""Exception hierarchy shared by all modules."""


class WRadiusError(Exception):
    """Base class for library errors."""


class ShapeMismatch(WRadiusError, ValueError):
    pass


class SpaceMismatch(WRadiusError, ValueError):
    pass


class NotHermitian(WRadiusError, ValueError):
    pass


class NoConvergence(WRadiusError, RuntimeError):
    pass


class DomainError(WRadiusError, ValueError):
    pass


class SearchFailure(WRadiusError, RuntimeError):
    pass


class DegenerateInput(WRadiusError, ValueError):
    pass


class FormatError(WRadiusError, ValueError):
    """Malformed input file; ``field`` names the offending key."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field
