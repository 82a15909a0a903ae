"""Exception types shared across the package."""


class ChiralCavError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(ChiralCavError, ValueError):
    """A parameter set or configuration violates an invariant."""


class SolverError(ChiralCavError, RuntimeError):
    """The steady-state system is degenerate or the integration failed."""


class PoleError(ChiralCavError, ValueError):
    """A closed-form expression was evaluated exactly on a pole."""


class DipNotFoundError(ChiralCavError, RuntimeError):
    """No spectral dip above the prominence threshold was found."""


class ProtocolExtinguishedError(ChiralCavError, RuntimeError):
    """A carving measurement removed essentially all state amplitude."""
