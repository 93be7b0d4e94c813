"""Exceptions raised by gm3cert.

Invalid input raises a subclass of `ValueError`, numerical trouble raises a
subclass of `ArithmeticError` or `RuntimeError`. All of them also derive from
`GM3Error`, so callers can catch everything gm3cert raises in one place.
"""

from typing import Optional


class GM3Error(Exception):
    """Base class for all gm3cert errors."""


class NonPositiveCoefficient(GM3Error, ValueError):
    """A diffusion coefficient, decay rate or the source is not strictly positive."""

    def __init__(self, field: str, value: float):
        self.field = field
        self.value = value
        super().__init__(
            f"Coefficient '{field}' must be strictly positive, got {value!r}."
        )


class NegativeExponent(GM3Error, ValueError):
    """A reaction exponent or the saturation constant c is negative."""

    def __init__(self, field: str, value: float):
        self.field = field
        self.value = value
        super().__init__(f"'{field}' must be non-negative, got {value!r}.")


class ConfigError(GM3Error, ValueError):
    """A run configuration or sweep specification could not be parsed."""


class StabilityViolation(GM3Error, ValueError):
    """The explicit Euler time step exceeds the diffusive stability bound."""


class NonPositiveMu(GM3Error, ValueError):
    """The decay rate mu of the Lyapunov inequality is not strictly positive."""


class InfeasibleBranch(GM3Error, ValueError):
    """The exponent condition (p1 - 1 bound) fails for both inhibitor branches."""


class DegenerateEpsilon(GM3Error, ValueError):
    """The admissible interval for the Young's-inequality epsilon is empty."""


class PreconditionViolated(GM3Error, ValueError):
    """Input to an oracle or to the certificate pipeline violates a precondition."""


class NonFiniteRate(GM3Error, ArithmeticError):
    """A reaction rate is not finite, usually because a field under- or overflowed."""

    def __init__(
        self, message: str, overflow: bool = True, component: Optional[str] = None
    ):
        self.overflow = overflow
        self.component = component
        super().__init__(message)


class NonFiniteValue(GM3Error, ArithmeticError):
    """The Lyapunov functional overflowed."""


class PositivityLoss(GM3Error, ArithmeticError):
    """A field value became non-positive during time stepping."""

    def __init__(
        self, component: str, cell: tuple, value: float, t: Optional[float] = None
    ):
        self.component = component
        self.cell = cell
        self.value = value
        self.t = t
        when = f" at t = {t!r}" if t is not None else ""
        super().__init__(
            f"Component '{component}' lost positivity in cell {cell}{when} "
            f"(value {value!r}). Try a smaller time step."
        )


class SolverFailure(GM3Error, RuntimeError):
    """The banded implicit solve failed or returned non-finite values."""


class IterationLimit(GM3Error, RuntimeError):
    """An iterative search hit its iteration cap."""
