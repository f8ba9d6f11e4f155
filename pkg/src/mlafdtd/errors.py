"""Exception types used across the solver."""


class MlaError(Exception):
    """Base class for all solver errors."""


class DimensionMismatch(MlaError):
    """A material matrix or field array has an inconsistent shape."""


class NonPositivePhysical(MlaError):
    """A physical constant that must be positive is not (eps0, mu0, h, ...)."""


class UnknownMaterial(MlaError):
    """Requested built-in material name is not registered."""


class ConfigError(MlaError):
    """Simulation configuration is malformed or inconsistent."""


class IoError(MlaError):
    """Output files could not be written or inputs could not be read."""


class NonFiniteField(MlaError):
    """NaN or Inf detected in a field array, usually a blown-up run."""

    def __init__(self, message: str, step: int | None = None, t: float | None = None):
        super().__init__(message)
        self.step = step
        self.t = t


class SingularInterfaceMatrix(MlaError):
    """Interface jump-condition matrix has a pivot below tolerance."""


class StageOrderViolation(MlaError):
    """Fourth-order interface Stage II invoked before Stage I."""


class UnsupportedDerivative(MlaError):
    """Closed-form derivative requested beyond the implemented order."""


class DegenerateInput(MlaError):
    """Diagnostic input is degenerate (e.g. zero error in a rate estimate)."""


class GridsNotNested(MlaError):
    """Self-convergence grids do not share common points."""


class PairingMismatch(MlaError):
    """Energy-pairing description is inconsistent with the material."""


class InvalidParams(MlaError):
    """Closed-form solution parameters outside their admissible range."""


class MissingColumns(MlaError):
    """A CSV table lacks required columns."""
