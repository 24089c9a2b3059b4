"""Exception hierarchy.

Every error raised by the package derives from :class:`GeometryError`, which
is itself a :class:`ValueError` so generic callers can catch it the usual way.
"""


class GeometryError(ValueError):
    """Base class for all package errors."""


class DomainError(GeometryError):
    """A scalar parameter lies outside its admissible domain."""


class InvalidStructureError(GeometryError):
    """A matrix fails the algebraic identity it is supposed to satisfy."""


class DegenerateBasisError(GeometryError):
    """A set of vectors is (numerically) linearly dependent."""


class RealizationError(GeometryError):
    """A factor's curvature is incompatible with its Euclidean realization."""


class OffManifoldError(GeometryError):
    """A point does not lie on the realized product manifold."""


class ArgumentError(GeometryError):
    """Inconsistent arguments (base points, conormals, tuples, ranges)."""


class ParseError(GeometryError):
    """Syntax or name error in an immersion expression."""

    def __init__(self, message, line=1, column=1, source=None):
        self.line = line
        self.column = column
        self.source = source
        self.reason = message
        super().__init__(f"{message} (line {line}, column {column})")


class EvaluationError(GeometryError):
    """Singular evaluation of an expression (division by ~0, sqrt of <= 0)."""

    def __init__(self, message, node=None):
        self.node = node
        super().__init__(message)


class ImmersionDegenerateError(GeometryError):
    """The induced metric is singular or too badly conditioned."""


class ConstraintError(GeometryError):
    """The immersion leaves the realized ambient manifold."""


class ClassificationError(GeometryError):
    """Slant data is inconsistent with the claimed submanifold type."""


class ConfigError(GeometryError):
    """Invalid CLI configuration; ``path`` locates the offending field."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")
