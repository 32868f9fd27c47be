"""Exception hierarchy.

Three families map onto the CLI exit codes: mathematically impossible
requests (2), numerical breakdowns (3) and malformed input (4).
"""


class FixdiagError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class InvalidInput(FixdiagError, ValueError):
    exit_code = 4


class MathematicalObstruction(FixdiagError):
    """The requested object does not exist (or is not reachable)."""

    exit_code = 2


class NumericalFailure(FixdiagError, ArithmeticError):
    exit_code = 3


# input errors
class NotHermitian(InvalidInput):
    pass


class NotPSD(InvalidInput):
    pass


class NotProjection(InvalidInput):
    pass


class NotIdempotent(InvalidInput):
    pass


class NotUnitary(InvalidInput):
    pass


class DimensionMismatch(InvalidInput):
    pass


class BadParameters(InvalidInput):
    pass


class SignConstraintViolated(BadParameters):
    pass


class NotHalfDiagonal(InvalidInput):
    pass


class NotAmplifiedDiagonal(InvalidInput):
    pass


class DiagonalMismatch(InvalidInput):
    pass


class RankMismatch(InvalidInput):
    pass


class NotIrreducible(InvalidInput):
    pass


class TrivialIdempotent(InvalidInput):
    pass


class TooLarge(InvalidInput):
    pass


class ComplexUnsupported(InvalidInput):
    pass


class NotTight(InvalidInput):
    pass


class NotConstantDiagonal(InvalidInput):
    pass


class WrongRedundancy(InvalidInput):
    pass


class BlockLawViolated(InvalidInput):
    def __init__(self, law, residual):
        super().__init__(f"block law ({law}) violated, residual {residual:.3g}")
        self.law = law
        self.residual = residual


class ParseError(InvalidInput):
    def __init__(self, message, location=""):
        text = f"{location}: {message}" if location else message
        super().__init__(text)
        self.location = location


# mathematical obstructions
class InfeasibleDiagonal(MathematicalObstruction):
    def __init__(self, report):
        super().__init__(f"diagonal is not realizable: {report.reason.value}")
        self.report = report


class Infeasible(MathematicalObstruction):
    def __init__(self, report):
        super().__init__(
            f"diagonal not realizable with this range: {report.reason.value} {list(report.blocks)}"
        )
        self.report = report


class DetUnreachable(MathematicalObstruction):
    pass


class WrongComponent(MathematicalObstruction):
    pass


class RealM2Disconnected(MathematicalObstruction):
    pass


class RealFiberObstruction(MathematicalObstruction):
    pass


class RealFullFamilyEmpty(MathematicalObstruction):
    pass


class RigidityViolation(MathematicalObstruction):
    pass


# numerical failures
class SolverBreakdown(NumericalFailure):
    pass


class GenericityExhausted(NumericalFailure):
    pass


class SingularPencil(NumericalFailure):
    pass


class KernelDimMismatch(NumericalFailure):
    pass
