"""Exception hierarchy shared across the package."""


class CatmcError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(CatmcError, ValueError):
    """An argument violates a documented precondition."""


class DegenerateFamilyError(CatmcError):
    """A link family has no usable slope information (all slopes equal)."""


class UnsupportedOperationError(CatmcError):
    """The requested operation is undefined for this family kind."""


class NumericError(CatmcError):
    """A numerical routine (e.g. an SVD) failed; context is in the message."""
