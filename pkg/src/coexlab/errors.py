class CoexError(Exception):
    """Base class; ``category`` doubles as the CLI exit-code label."""

    category = "error"
    exit_code = 1


class InvalidParameter(CoexError, ValueError):
    category = "validation"
    exit_code = 2

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class SingularModel(CoexError, ArithmeticError):
    category = "model"
    exit_code = 3


class ModelInconsistency(CoexError, ArithmeticError):
    category = "model"
    exit_code = 3


class ConvergenceFailure(CoexError, RuntimeError):
    category = "convergence"
    exit_code = 4

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


class UnstableSystem(CoexError, RuntimeError):
    category = "convergence"
    exit_code = 4


class OutputError(CoexError, OSError):
    category = "io"
    exit_code = 5

    def __init__(self, message: str, path: str | None = None):
        super().__init__(message)
        self.path = path
