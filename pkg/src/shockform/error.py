class ShockformError(Exception):
    """
    Base shockform exception. All exceptions should derive this.
    """
    pass


"""
Configuration errors, reported with exit code 2 by the command line.
"""


class ConfigError(ShockformError):
    pass


class Malformed(ConfigError):
    pass


class InvalidParams(ConfigError):
    pass


class CoupledParamsRejected(ConfigError):
    pass


"""
Model and domain errors.
"""


class NonHyperbolic(ShockformError):
    pass


class OutOfDomain(ShockformError):
    pass


class NonPositiveMargin(ShockformError):
    pass


class NegativeRadicand(ShockformError):
    pass


"""
Numerical errors raised by solvers, root finders and integrators.
"""


class NumericalError(ShockformError):
    pass


class NoConvergence(NumericalError):
    pass


class SingularJacobian(NumericalError):
    pass


class NoBracket(NumericalError):
    pass


class RootBracketFailure(NumericalError):
    pass


class CFLViolation(NumericalError):
    pass


class OutOfBall(NumericalError):
    pass


class InterpolationOutOfRange(NumericalError):
    pass


class StepSizeUnderflow(NumericalError):
    pass


class DegenerateFan(NumericalError):
    pass


"""
Shock analysis errors.
"""


class ShockError(ShockformError):
    pass


class ZeroSeed(ShockError):
    pass


class NotGenuinelyNonlinear(ShockError):
    pass


class ZeroPositivePart(ShockError):
    pass


class NoShockDetected(ShockError):
    pass


class NonPositiveConstant(ShockError):
    pass


class PostShockQuery(ShockError):
    pass


class NoShock(ShockError):
    pass
