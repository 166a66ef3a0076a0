"""Exception types shared across the package."""


class SetDynError(Exception):
    """Base class for all errors raised by setdyn."""


class InvalidArgumentError(SetDynError, ValueError):
    """An argument is outside the domain of the operation."""


class PreconditionError(SetDynError):
    """A mathematical precondition of the operation does not hold."""


class ResourceLimitError(SetDynError):
    """A size or enumeration cap was exceeded.

    ``count`` carries the number of items produced before giving up, so a
    caller can resize the cap and retry.
    """

    def __init__(self, message, count=None):
        super().__init__(message)
        self.count = count


class ConstructionError(SetDynError):
    """A constructive procedure failed where theory says it must succeed.

    ``detail`` holds whatever partial object helps diagnose the failure.
    """

    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail
