"""Exception types shared across the toolkit."""


class SpecSyntaxError(ValueError):
    """A group spec string could not be parsed."""


class CapExceeded(RuntimeError):
    """A ball or enumeration grew past its configured size cap."""

    def __init__(self, message, size=None, cap=None):
        super().__init__(message)
        self.size = size
        self.cap = cap


class RadiusTooSmall(RuntimeError):
    """A construction ran out of room in its working ball.

    `suggested` carries a radius that is expected to be sufficient.
    """

    def __init__(self, message, suggested=None):
        super().__init__(message)
        self.suggested = suggested
