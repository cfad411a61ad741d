"""Exception types raised across the package."""


class ConfigError(ValueError):
    """Invalid or inconsistent configuration."""


class ShapeError(ValueError):
    """Array dimensions do not match what a network or scheme expects."""


class NumericalError(ArithmeticError):
    """An iterate became non-finite.

    ``partial`` carries whatever was computed before the failure (a solver
    trace, a parameter vector, ...) so callers can inspect it.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class DegenerateStepError(NumericalError):
    """Natural-gradient step is undefined (g^T F^-1 g <= 0 or non-finite)."""


class TrainingError(RuntimeError):
    """Training diverged; ``checkpoint`` holds the last state for diagnosis."""

    def __init__(self, message, checkpoint=None):
        super().__init__(message)
        self.checkpoint = checkpoint
