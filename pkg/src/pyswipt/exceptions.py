"""
PySWIPT Exception Classes

Base exception classes for error handling across the power-control engine and
the simulation harness. All exceptions carry a context dictionary so that
failures can be logged and serialised with the values that triggered them.

Infeasible scenarios are not errors: solvers report them through
``Allocation.feasible``. Exceptions are reserved for invalid input, caller bugs
and numerical failures.
"""

from typing import Optional, Dict, Any
import traceback


class PySwiptError(Exception):
    """Base exception for all PySWIPT errors."""

    def __init__(
        self,
        message: str,
        context: Optional[Dict[str, Any]] = None,
        cause: Optional[Exception] = None
    ):
        super().__init__(message)
        self.message = message
        self.context = context or {}
        self.cause = cause
        self.traceback_str = traceback.format_exc() if cause else None

    def __str__(self) -> str:
        """Return formatted error message with context."""
        base_msg = super().__str__()
        shown = {k: v for k, v in self.context.items() if v is not None}
        if shown:
            context_str = ", ".join(f"{k}={v}" for k, v in shown.items())
            return f"{base_msg} (context: {context_str})"
        return base_msg

    def to_dict(self) -> Dict[str, Any]:
        """Convert exception to dictionary for logging/serialization."""
        return {
            "error_type": self.__class__.__name__,
            "message": self.message,
            "context": self.context,
            "cause": str(self.cause) if self.cause else None,
            "traceback": self.traceback_str
        }


class ValidationError(PySwiptError):
    """Raised when a scenario, geometry or argument fails validation.

    Attributes:
        field_name: Name of the offending field
        invalid_value: The value that failed validation
        expected: Human-readable description of the accepted values
    """

    def __init__(
        self,
        message: str,
        field_name: Optional[str] = None,
        invalid_value: Optional[Any] = None,
        expected: Optional[str] = None,
        **kwargs: Any
    ):
        context = {
            "field_name": field_name,
            "invalid_value": invalid_value,
            "expected": expected
        }
        context.update(kwargs)
        super().__init__(message, context)
        self.field_name = field_name
        self.invalid_value = invalid_value
        self.expected = expected


class ConfigError(ValidationError):
    """Raised when a JSON configuration file cannot be loaded or validated.

    Attributes:
        path: Path of the configuration file, if known
    """

    def __init__(
        self,
        message: str,
        path: Optional[str] = None,
        field_name: Optional[str] = None,
        invalid_value: Optional[Any] = None,
        expected: Optional[str] = None,
        **kwargs: Any
    ):
        super().__init__(
            message,
            field_name=field_name,
            invalid_value=invalid_value,
            expected=expected,
            path=path,
            **kwargs
        )
        self.path = path


class ChannelError(PySwiptError):
    """Raised when channel realizations cannot be generated.

    Attributes:
        expected_length: Number of geometry entries the scenario needs
        actual_length: Number of geometry entries supplied
    """

    def __init__(
        self,
        message: str,
        expected_length: Optional[int] = None,
        actual_length: Optional[int] = None,
        **kwargs: Any
    ):
        context = {
            "expected_length": expected_length,
            "actual_length": actual_length
        }
        context.update(kwargs)
        super().__init__(message, context)
        self.expected_length = expected_length
        self.actual_length = actual_length


class SolverError(PySwiptError):
    """Raised when a numerical solver fails to converge.

    Attributes:
        solver: Name of the failing solver
        iterations: Iterations spent before giving up
        residual: Constraint residual at failure
    """

    def __init__(
        self,
        message: str,
        solver: Optional[str] = None,
        iterations: Optional[int] = None,
        residual: Optional[float] = None,
        **kwargs: Any
    ):
        context = {
            "solver": solver,
            "iterations": iterations,
            "residual": residual
        }
        context.update(kwargs)
        super().__init__(message, context)
        self.solver = solver
        self.iterations = iterations
        self.residual = residual


class InfeasibleError(PySwiptError):
    """Raised on request when a circuit-power constraint cannot be met.

    Attributes:
        required: Power the constraint requires
        available: Largest power the scenario can deliver
    """

    def __init__(
        self,
        message: str,
        required: Optional[float] = None,
        available: Optional[float] = None,
        **kwargs: Any
    ):
        context = {"required": required, "available": available}
        context.update(kwargs)
        super().__init__(message, context)
        self.required = required
        self.available = available


class AllocationError(PySwiptError):
    """Raised when an allocation handed to an evaluator breaks its budgets.

    This signals a caller bug, never an infeasible scenario.

    Attributes:
        constraint: Name of the violated constraint
        excess: Amount by which the constraint is exceeded
    """

    def __init__(
        self,
        message: str,
        constraint: Optional[str] = None,
        excess: Optional[float] = None,
        **kwargs: Any
    ):
        context = {"constraint": constraint, "excess": excess}
        context.update(kwargs)
        super().__init__(message, context)
        self.constraint = constraint
        self.excess = excess


class OracleSizeError(ValidationError):
    """Raised when an instance is too large for brute-force enumeration."""


class SimulationError(PySwiptError):
    """Raised when a Monte Carlo sweep cannot be configured or executed.

    Attributes:
        point_index: Sweep point being processed, if known
        trial_index: Trial being processed, if known
    """

    def __init__(
        self,
        message: str,
        point_index: Optional[int] = None,
        trial_index: Optional[int] = None,
        cause: Optional[Exception] = None,
        **kwargs: Any
    ):
        context = {"point_index": point_index, "trial_index": trial_index}
        context.update(kwargs)
        super().__init__(message, context, cause=cause)
        self.point_index = point_index
        self.trial_index = trial_index


# Exception mapping for error handling utilities
EXCEPTION_CATEGORIES = {
    "validation": ValidationError,
    "config": ConfigError,
    "channel": ChannelError,
    "solver": SolverError,
    "infeasible": InfeasibleError,
    "allocation": AllocationError,
    "oracle_size": OracleSizeError,
    "simulation": SimulationError,
    "general": PySwiptError
}


def create_exception(category: str, *args: Any, **kwargs: Any) -> PySwiptError:
    """Factory function to create appropriate exception by category.

    Args:
        category: Exception category (validation, solver, etc.)
        *args: Arguments passed to exception constructor
        **kwargs: Keyword arguments passed to exception constructor

    Returns:
        Instantiated exception of appropriate type

    Raises:
        ValueError: If category is not recognized
    """
    if category not in EXCEPTION_CATEGORIES:
        raise ValueError(f"Unknown exception category: {category}")

    exception_class = EXCEPTION_CATEGORIES[category]
    return exception_class(*args, **kwargs)
