"""Exception hierarchy shared by every layer of the package."""


class McubeError(Exception):
    """Base class for all errors raised by mcube."""


class ShapeError(McubeError, ValueError):
    """Sizes, orders or lengths are inconsistent with each other."""


class CoordinateError(McubeError, IndexError):
    """A multi-index coordinate falls outside its shifted indexing set."""


class DomainError(McubeError, ValueError):
    """An argument lies outside the domain an operation accepts."""


class NonFiniteError(McubeError, ArithmeticError):
    """A NaN or infinity appeared where only finite scalars are allowed."""


class PoleError(McubeError, ArithmeticError):
    """Rational interpolation hit a (near) zero denominator."""


class FormatError(McubeError, ValueError):
    """A binary array/grid file is malformed."""


class MemoryGuardError(McubeError, MemoryError):
    """A requested grid would exceed the configured element budget."""
