"""Exception hierarchy shared across the package."""


class PDLError(Exception):
    """Base class for all package errors."""


class GridError(PDLError, ValueError):
    """Invalid grid parameters or a grid too narrow for the requested state."""


class ConfigError(PDLError, ValueError):
    """Malformed or inconsistent run configuration."""


class NumericalConsistencyError(PDLError, ArithmeticError):
    """A quantity left its mathematically admissible range beyond tolerance."""


class RegimeError(PDLError, ValueError):
    """An asymptotic formula was requested outside its regime of validity."""


class BalanceLineError(PDLError, ValueError):
    """The mean generator vanishes, so the Margolus-Levitin branch is undefined."""


class ModelError(PDLError, ValueError):
    """Potential samples incompatible with the requested model."""


class MissingCouplingError(PDLError, ValueError):
    """A lab coupling needed for a chain-rule conversion was not supplied."""


class PropagationError(PDLError, RuntimeError):
    """Split-step propagation aborted; ``partial`` holds the records so far."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class BoundaryMassError(PropagationError):
    """Too much power reached the outer edge of the periodic window."""


class NonFiniteError(PropagationError):
    """The field acquired NaN or infinite samples."""
