"""Exception hierarchy shared by all modules."""


class QedsatError(Exception):
    """Base class for every error raised by the package."""


class KinematicsError(QedsatError, ValueError):
    pass


class NonPositiveMu(KinematicsError):
    pass


class NonPositiveMass(KinematicsError):
    pass


class AngleOutOfRange(KinematicsError):
    pass


class CollinearPole(QedsatError, ArithmeticError):
    """A propagator denominator vanished: the sampling point sits on a pole."""


class ZeroVector(QedsatError, ValueError):
    pass


class PatternViolation(QedsatError, ValueError):
    pass


class ComplexParams(QedsatError, ValueError):
    pass


class SolverFailure(QedsatError, ArithmeticError):
    def __init__(self, message, best_residual=None):
        super().__init__(message)
        self.best_residual = best_residual


class DegenerateMap(QedsatError, ArithmeticError):
    """The map sent the current state to (numerically) zero."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class Overflow(QedsatError, OverflowError):
    pass


class ConfigError(QedsatError, ValueError):
    """Invalid run configuration; ``field`` names the offending key."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message
