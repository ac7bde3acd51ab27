"""Exception hierarchy shared by all qjsd modules."""


class QJSDError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(QJSDError, ValueError):
    """An input does not satisfy the contract of the operation."""


class FormatError(ValidationError):
    """A matrix or point-set document is malformed.

    ``field`` names the offending entry so command-line users can fix it.
    """

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class DimensionMismatch(ValidationError):
    pass


class DomainError(ValidationError):
    """A scalar function was evaluated outside its domain (e.g. log at 0)."""


class SingularInput(DomainError):
    """A positive definite input was required but a matrix is (near) singular."""


class AsymmetricInput(ValidationError):
    pass


class NotEmbeddable(QJSDError):
    """An embedding was requested for a kernel that is not negative definite."""


class NonConvergence(QJSDError, ArithmeticError):
    pass


class NumericalInconsistency(QJSDError, ArithmeticError):
    """A computed quantity violated a guaranteed bound beyond round-off."""
