"""Exception hierarchy.

Every error carries a machine-readable ``code`` (the class name) and an
``exit_status`` used by the command line front end.
"""


class ToricError(Exception):
    exit_status = 1

    def __init__(self, message="", **payload):
        super().__init__(message)
        self.payload = payload

    @property
    def code(self):
        return type(self).__name__


class ValidationError(ToricError):
    exit_status = 2


class ParseError(ValidationError):
    pass


class InternalLimit(ToricError):
    exit_status = 4


# lattice layer
class NotFullRank(ValidationError):
    pass


class RankMismatch(ValidationError):
    pass


class NotContained(ValidationError):
    pass


class NotPrincipal(ToricError):
    """Raised with the full antichain of minimal elements in ``payload``."""

    exit_status = 3

    @property
    def antichain(self):
        return self.payload.get("antichain", [])


class BoxTooSmall(InternalLimit):
    pass


# configurations and divisors
class InvalidSigns(ValidationError):
    pass


class NotPrimitive(ValidationError):
    pass


class BadRange(ValidationError):
    pass


class SupportError(ValidationError):
    pass


class NotInCone(ValidationError):
    pass


class BadInput(ValidationError):
    pass


class ConfigMismatch(ValidationError):
    pass


class WrongDirection(ValidationError):
    pass


# functor layer
class OutOfRange(ValidationError):
    pass


class BadStratum(ValidationError):
    pass


class EmptyTilting(ValidationError):
    pass
