"""Exception hierarchy shared across the package."""


class OpenBathError(Exception):
    """Base class for all package errors."""


class ConfigError(OpenBathError):
    """Invalid configuration."""


class NonPositiveGamma(ConfigError):
    pass


class OverlappingEmitters(ConfigError):
    pass


class BadDimension(ConfigError):
    pass


class NumericalError(OpenBathError):
    """Numerical evaluation failed or is undefined at the requested point."""


class OnBranchCut(NumericalError):
    """Frequency lies on (or too close to) the bath continuum."""


class BranchPoint(NumericalError):
    """Frequency coincides with a branch point of the continued self-energy."""


class DegenerateCircle(NumericalError):
    """Gamma = 2J: the branch curve degenerates to a circle (J_eff = 0)."""


class OutOfBand(NumericalError):
    """Dissipation rate outside the band [min gamma_k, max gamma_k]."""


class OutOfCut(NumericalError):
    """Abscissa outside the collapsed branch cut (-2 J_eff, 2 J_eff)."""


class NoConvergence(NumericalError):
    """Iterative solver failed to converge."""


class PoleOnCut(NumericalError):
    """A root search terminated on the branch cut instead of a pole."""


class SingularPair(NumericalError):
    """Pair-bubble evaluation at a point of its singular set."""


class ZeroBubble(NumericalError):
    """Pair bubble vanishes; the interacting pair propagator is undefined."""


class UnknownCase(OpenBathError):
    pass


class InvalidExponent(NumericalError):
    """Edge exponent ratio d/mu outside the supported range."""


class OutsideValidity(NumericalError):
    """Requested evaluation violates the validity conditions of the method."""


class UnclassifiedEdge(NumericalError):
    """Band-edge power-law fit failed; cannot classify the band."""


class NonPositiveData(NumericalError):
    """Log-log fit requested on non-positive data."""


class ResonantPole(NumericalError):
    """Scattering-matrix denominator below tolerance."""


class TooLarge(OpenBathError):
    """Requested finite model exceeds the dimension guard."""


class DimensionGuard(TooLarge):
    """Lindblad Hilbert space exceeds the guard."""


class TraceDrift(NumericalError):
    """Density-matrix trace drifted beyond tolerance during integration."""


class StepRejected(NumericalError):
    """Propagation step rejected: local error above tolerance."""
