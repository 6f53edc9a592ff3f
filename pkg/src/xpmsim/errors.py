"""Exception types shared across the package."""


class XpmError(Exception):
    """Base class for all package errors."""


class PoleError(XpmError):
    """A closed-form denominator is within the pole guard of zero."""

    def __init__(self, name: str, magnitude: float, guard: float):
        self.name = name
        self.magnitude = magnitude
        self.guard = guard
        super().__init__(
            f"|{name}| = {magnitude:.3e} is below the pole guard {guard:.1e}"
        )


class CaseError(XpmError):
    """Operation called outside its validity case (EIT vs CPT, detuning lock)."""


class SignatureMismatch(XpmError):
    """Terms compared across fields do not share a photon-process signature."""


class SingularMatrixError(XpmError):
    """Linear system is singular or too ill-conditioned to solve reliably."""


class DegenerateSteadyStateError(XpmError):
    """Steady-state null space has dimension > 1 and no fallback succeeded."""

    def __init__(self, nullspace_dim: int, detail: str = ""):
        self.nullspace_dim = nullspace_dim
        msg = f"Liouvillian null space has dimension {nullspace_dim}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class NonConvergenceError(XpmError):
    """Time evolution failed to reach a steady state within the horizon."""

    def __init__(self, residual: float, t_reached: float, tol: float):
        self.residual = residual
        self.t_reached = t_reached
        self.tol = tol
        super().__init__(
            f"residual {residual:.3e} > {tol:.1e} after evolving to t = {t_reached:.3e}"
        )


class GridMismatchError(XpmError):
    """Sweep results compared on different axis grids."""


class ConfigError(XpmError):
    """Malformed run configuration."""
