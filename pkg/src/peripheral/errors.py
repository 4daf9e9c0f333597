"""Exception hierarchy.

Validation problems (bad input data) and numerical problems (an algorithm
that could not reach a trustworthy answer) are kept apart so the CLI can map
them to distinct exit codes.
"""


class PeripheralError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(PeripheralError, ValueError):
    """Input data violates a documented invariant."""


class NumericalError(PeripheralError, ArithmeticError):
    """A numerical step failed or produced an untrustworthy result."""


class AmbiguousSpectrumError(NumericalError):
    """Eigenvalues sit too close to the peripheral threshold to classify."""

    def __init__(self, moduli):
        self.moduli = list(moduli)
        shown = ", ".join(f"{m:.12g}" for m in self.moduli[:8])
        super().__init__(f"eigenvalue moduli too close to the unit circle to classify: {shown}")


class IllConditionedError(NumericalError):
    """A biorthogonal Gram matrix (or similar) is numerically singular."""

    def __init__(self, message, condition_number):
        self.condition_number = condition_number
        super().__init__(f"{message} (condition number {condition_number:.3g})")


class ConvergenceError(NumericalError):
    """An iterative step did not settle."""
