"""Exception hierarchy shared by every module."""


class PisotFieldError(Exception):
    """Base class for errors raised by this package."""


class InvalidFieldSpec(PisotFieldError, ValueError):
    """A field-spec document or FieldSpec fails validation."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class PrecisionExhausted(PisotFieldError):
    """A certified comparison stayed inconclusive up to the precision cap."""


class Inconclusive(PisotFieldError):
    """Raised internally when the current precision cannot decide a comparison."""


class BoundaryDegenerate(PisotFieldError):
    """A polynomial has a root exactly on the circle being tested against."""

    def __init__(self, message, factor=None):
        super().__init__(message)
        self.factor = factor


class InternalConsistencyError(PisotFieldError):
    """A guarantee that must hold by construction was violated."""


class NotInEK(PisotFieldError, ValueError):
    """The element handed to a decomposition routine is not in E_K."""
