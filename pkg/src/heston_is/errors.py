"""Exception types shared across the package."""


class HestonISError(Exception):
    """Base class for all package errors."""


class ParameterError(HestonISError, ValueError):
    """Invalid model/market input, or a parameter regime the method does not cover."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class DomainError(HestonISError, ValueError):
    """Argument outside the open effective domain of a function."""

    def __init__(self, message, endpoint=None):
        super().__init__(message)
        self.endpoint = endpoint


class SingularityError(DomainError):
    """Argument at or past a tangent pole."""


class ExplosionError(HestonISError, ArithmeticError):
    """Riccati solution blew up before the horizon."""

    def __init__(self, message, time):
        super().__init__(message)
        self.time = time


class ConvergenceError(HestonISError, RuntimeError):
    """An iterative routine ran out of iterations."""

    def __init__(self, message, bracket=None, diagnostics=None):
        super().__init__(message)
        self.bracket = bracket
        self.diagnostics = diagnostics or {}
