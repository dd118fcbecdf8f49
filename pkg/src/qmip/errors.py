"""Exception types raised across the package."""


class QMIPError(Exception):
    """Base class for all package errors."""


class ShapeError(QMIPError, ValueError):
    """Operand dimensions do not conform."""


class ContractError(QMIPError, ValueError):
    """An input violates the documented precondition of an operation."""


class NumericError(QMIPError, ArithmeticError):
    """An iterative routine failed to converge or a numerical check failed."""

    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class DimensionLimitError(QMIPError):
    """The requested system exceeds the configured qubit cap."""


class AddressingError(QMIPError, KeyError):
    """Unknown register name or qubit index."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class CutError(QMIPError, ValueError):
    """A bipartition or tripartition of registers is malformed."""


class CapacityError(QMIPError):
    """A requested budget is too small for the data it must hold."""

    def __init__(self, message, rank=None):
        super().__init__(message)
        self.rank = rank


class PreconditionError(ContractError):
    """Reduced states that must agree do not; ``gap`` carries the norm gap."""

    def __init__(self, message, gap=None):
        super().__init__(message)
        self.gap = gap


class GateError(QMIPError, ValueError):
    """Malformed gate application (bad or colliding target indices)."""


class ValidationError(ContractError):
    """A protocol description failed validation; ``violations`` lists why."""

    def __init__(self, violations):
        super().__init__("; ".join(violations))
        self.violations = list(violations)


class UnsupportedTransformError(QMIPError):
    """The transform is not defined for this kind of protocol."""
