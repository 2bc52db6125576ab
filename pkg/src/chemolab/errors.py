"""Exception types shared across the package."""


class ChemolabError(Exception):
    pass


class ConfigurationError(ChemolabError, ValueError):
    """Invalid run configuration (bad parameter, malformed file, unknown key)."""


class SingularSensitivityError(ChemolabError, ValueError):
    """Sensitivity chi0/(a+s)^k evaluated at a + s <= 0."""


class SolverDivergenceError(ChemolabError, RuntimeError):
    """Linear solve hit its iteration cap before reaching tolerance."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class PositivityError(ChemolabError, RuntimeError):
    """Cell density dropped below the scheme's negativity tolerance."""

    def __init__(self, message, cell, value, time=None):
        super().__init__(message)
        self.cell = cell
        self.value = value
        self.time = time


class StepError(ChemolabError, RuntimeError):
    """A time step failed; carries the simulation time and the original error."""

    def __init__(self, time, cause):
        super().__init__(f"step failed at t={time!r}: {cause}")
        self.time = time
        self.cause = cause
