"""Exception hierarchy shared by all davinci modules."""


class DavinciError(Exception):
    """Base class for every error raised by this package."""


# surface maps
class MalformedRotation(DavinciError):
    pass


class DanglingEdge(DavinciError):
    pass


class OddCharacteristic(DavinciError):
    pass


class ConnectivityRequired(DavinciError):
    pass


# rods
class IdentityViolated(DavinciError):
    pass


class NotCubic(DavinciError):
    pass


class Disconnected(DavinciError):
    pass


# periodic patterns
class InvalidPattern(DavinciError):
    pass


class QuotientNotCellular(DavinciError):
    pass


class FitFailed(DavinciError):
    pass


class EmptyPatch(DavinciError):
    pass


# embeddings
class NonTriangularFace(DavinciError):
    pass


class DegenerateCorner(DavinciError):
    pass


class DescartesViolated(DavinciError):
    pass


# form finding
class InvalidDepths(DavinciError):
    pass


class DegenerateJoint(DavinciError):
    pass


class NoConvergence(DavinciError):
    """Raised when the solver misses its residual tolerance.

    The best configuration found so far is kept on ``solution``.
    """

    def __init__(self, message, solution=None):
        super().__init__(message)
        self.solution = solution


# io
class ParseError(DavinciError):
    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
        self.line = line
        self.column = column
