"""Exception hierarchy.

Each error class carries the process exit code the CLI maps it to.
"""


class QlocalError(Exception):
    exit_code = 4


class ValidationError(QlocalError, ValueError):
    """Malformed input: bad shapes, non-Hermitian operators, bad files."""

    exit_code = 2

    def __init__(self, message, field=None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class DimensionError(ValidationError):
    pass


class UnsupportedInputError(ValidationError):
    pass


class LocalityViolationError(QlocalError):
    """Wing operators fail to commute, so product observables are not Hermitian."""

    exit_code = 3


class NumericalError(QlocalError, ArithmeticError):
    exit_code = 4
