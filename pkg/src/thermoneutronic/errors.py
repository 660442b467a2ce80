"""Exception hierarchy shared by all solver modules."""


class ThermoNeutronicError(Exception):
    """Base class for every error raised by this package."""


class NonPositiveSample(ThermoNeutronicError, ValueError):
    pass


class InvalidShape(ThermoNeutronicError, ValueError):
    pass


class NonPositiveProjection(ThermoNeutronicError, ValueError):
    pass


class DomainError(ThermoNeutronicError, ValueError):
    pass


class ParameterOutOfRange(ThermoNeutronicError, ValueError):
    pass


class InfeasibleLambda(ThermoNeutronicError, ValueError):
    """psi_lambda is not positive on (0, 1): lambda is at or below the feasibility bound."""


class NearDegenerate(ThermoNeutronicError, ArithmeticError):
    """Two roots of psi_lambda (nearly) collide; closed-form dispatch is unsafe."""


class DegenerateMap(ThermoNeutronicError, ArithmeticError):
    """A homographic map denominator vanished, which signals a misclassified case."""


class BracketFailure(ThermoNeutronicError, RuntimeError):
    pass


class InfeasibleBracket(BracketFailure):
    pass


class NoConvergence(ThermoNeutronicError, RuntimeError):
    pass


class MeshTooSmall(ThermoNeutronicError, ValueError):
    pass


class IterationStall(ThermoNeutronicError, RuntimeError):
    pass


class MaxIterExceeded(ThermoNeutronicError, RuntimeError):
    pass


class ConfigError(ThermoNeutronicError, ValueError):
    pass
