"""Exception types shared across the package."""


class HgsError(Exception):
    """Base class for errors raised by this package."""


class DomainError(HgsError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class GridMismatchError(HgsError, ValueError):
    """Two fields do not live on the same spectral grid."""


class EmptyGridError(HgsError, ValueError):
    """A spectral grid would contain no quadrature nodes."""


class FieldFormatError(HgsError, ValueError):
    """A field file could not be parsed.

    Carries the 1-based line number of the offending record.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NotApplicableError(HgsError, ValueError):
    """An exact criterion does not apply to the given input."""


class WindowStructureError(HgsError, ValueError):
    """A window lacks the structure an exact algorithm requires."""
