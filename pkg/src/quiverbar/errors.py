"""Exception hierarchy shared by every module."""


class QuiverBarError(Exception):
    """Base class for all library errors."""


class DivisionByZero(QuiverBarError, ZeroDivisionError):
    pass


class FieldMismatch(QuiverBarError, ValueError):
    pass


class DimensionMismatch(QuiverBarError, ValueError):
    pass


class Inconsistent(QuiverBarError, ValueError):
    """Linear system has no solution."""


class NotTriangular(QuiverBarError, ValueError):
    pass


class ShapeViolation(QuiverBarError, ValueError):
    pass


class BlockStructureViolation(QuiverBarError, ValueError):
    pass


class NotInvertible(QuiverBarError, ValueError):
    pass


class DuplicateSimplex(QuiverBarError, ValueError):
    pass


class ImageSimplexMissing(QuiverBarError, ValueError):
    pass


class ChainMapViolation(QuiverBarError, ValueError):
    pass


class NotComposable(QuiverBarError, ValueError):
    pass


class NotBarcodeForm(QuiverBarError, ValueError):
    pass


class NotPersistenceType(QuiverBarError, ValueError):
    pass


class ValidationError(QuiverBarError, ValueError):
    pass


class ParseError(QuiverBarError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
