"""Exception taxonomy for the spinvault package.

Every error raised by the library derives from SpinVaultError so callers
(and the CLI) can distinguish domain failures from programming errors.
Configuration problems map to exit code 2, numerical failures to exit
code 3; see cli.py.
"""


class SpinVaultError(Exception):
    """Base class for all spinvault domain errors."""


# --- configuration / validation (CLI exit code 2) ---

class ConfigError(SpinVaultError):
    """A scenario or parameter bundle is unusable."""


class ConfigNotFound(ConfigError):
    pass


class ValidationFailed(ConfigError):
    """One or more parameter invariants are violated.

    Carries the violation list so callers can report every problem at
    once instead of failing on the first.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"parameter validation failed: {lines}")


class UnknownField(ConfigError):
    """A sweep or override referenced a field that does not exist."""


class EmptyGrid(ConfigError):
    """A sweep was requested with no grid points."""


# --- analytics domain errors ---

class NonPositiveKappa(SpinVaultError):
    """Cavity decay rate must be positive."""


class FinesseTooSmall(SpinVaultError):
    """Comb finesse below 1 has no dephasing model."""


class OverdampedExchange(SpinVaultError):
    """Spin decoherence exceeds the exchange rate; no half-swap exists."""


# --- pulse simulation ---

class OutOfWindow(SpinVaultError):
    """Envelope evaluated outside the pulse window [0, T]."""


class IntegratorFailure(SpinVaultError):
    """The adaptive integrator failed to reach the end of the interval."""


# --- spin PDE ---

class GridTooCoarse(SpinVaultError):
    """Radial grid has too few points for the finite-difference stencils."""


class StiffnessBailout(IntegratorFailure):
    """Step size collapsed below 1e-15 s; the system is effectively stiff."""


# --- repeater model ---

class DegenerateLink(SpinVaultError):
    """Repeater needs at least two elementary links."""


class NoCrossover(SpinVaultError):
    """Repeater never overtakes direct transmission in the search bracket."""


class NeverReachable(SpinVaultError):
    """Entanglement distribution exceeds the storage time even at the
    lower distance bound."""


# --- CLI compute wrapper (exit code 3) ---

class ComputeFailed(SpinVaultError):
    """A numerical computation failed after configuration was accepted."""
