"""Exception types shared across the package."""


class PlurigreenError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(PlurigreenError, ValueError):
    """A scalar parameter lies outside its admissible range (e.g. |a| >= 1)."""


class DimensionError(PlurigreenError, ValueError):
    pass


class DomainError(PlurigreenError, ValueError):
    """A point lies outside the domain an operation is defined on."""


class GeometryError(PlurigreenError, ValueError):
    """Pole/point geometry violates an operation's precondition."""


class DegenerateSliceError(PlurigreenError):
    """The complex slice xi -> u(xi z) is identically -inf at every sample."""


class SingularStencilError(PlurigreenError):
    """A finite-difference stencil touched a non-finite value."""


class EmptyGridError(PlurigreenError):
    pass


class ParseError(PlurigreenError, ValueError):
    pass
