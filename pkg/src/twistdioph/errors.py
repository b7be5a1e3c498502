"""Exception hierarchy shared by every module of the package."""


class TwistDiophError(Exception):
    """Base class for all errors raised by twistdioph."""


class ParseError(TwistDiophError, ValueError):
    def __init__(self, message, code="E_PARSE"):
        super().__init__(message)
        self.code = code


class NotInLocalRing(TwistDiophError, ArithmeticError):
    pass


class DivisionByZero(TwistDiophError, ZeroDivisionError):
    pass


class SingularCurve(TwistDiophError, ValueError):
    pass


class OffCurve(TwistDiophError, ValueError):
    pass


class NotInAffinePart(TwistDiophError, ValueError):
    pass


class ChartUndefined(TwistDiophError, ValueError):
    pass


class HypothesisNotVerified(TwistDiophError, ValueError):
    pass


class ConstantMap(TwistDiophError, ValueError):
    pass


class NotInLambda(TwistDiophError, ValueError):
    pass


class ZeroPolynomial(TwistDiophError, ValueError):
    pass


class ZeroCoefficient(TwistDiophError, ValueError):
    pass


class IndeterminateCoefficient(TwistDiophError, ValueError):
    pass


class PreconditionViolated(TwistDiophError, ValueError):
    pass


class NotAdmissible(TwistDiophError, ValueError):
    pass


class UnsupportedBackend(TwistDiophError, ValueError):
    pass


class NotASolution(TwistDiophError, ValueError):
    pass


class PrecisionError(TwistDiophError, ArithmeticError):
    """A truncated t-adic computation hit a non-unit divisor."""
