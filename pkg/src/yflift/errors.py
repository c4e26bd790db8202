"""Exception types shared across the package."""


class YFError(Exception):
    """Base class for all package errors."""


class ConfigError(YFError):
    pass


class InvalidDiscriminant(ConfigError):
    pass


class DegreeError(YFError):
    pass


class SingularMatrixError(YFError):
    pass


class DomainError(YFError):
    pass


class RamifiedPrimeError(YFError):
    pass


class PrecisionError(YFError):
    pass


class NotEigenError(YFError):
    pass


class GaloisSelfDualError(YFError):
    pass


class TruncationError(YFError):
    pass


class InconclusiveError(YFError):
    pass


class VerificationError(YFError):
    pass


class DecompositionError(YFError):
    pass


class UnsupportedElement(YFError):
    pass


class UnsupportedFieldError(YFError):
    pass


class DataError(YFError):
    pass


class IdentityError(YFError):
    pass
