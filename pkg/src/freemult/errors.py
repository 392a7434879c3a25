"""Exception types shared across the package."""


class FreemultError(Exception):
    """Base class for all package-specific errors."""


class DomainError(FreemultError):
    """Evaluation point lies outside (or too close to the edge of) the
    analyticity domain of the requested transform."""


class QuadratureError(FreemultError):
    """A quadrature failed to reach its accuracy target."""


class PoleError(FreemultError):
    """Denominator 1 + psi vanished; eta has a pole at the requested point."""


class ZeroEtaError(FreemultError):
    """eta vanished where kappa = z/eta was requested."""


class InversionError(FreemultError):
    """Local inversion of eta (Newton) failed to converge."""


class WindingAmbiguity(FreemultError):
    """Winding-number zero count did not stabilise to an integer."""


class BranchError(FreemultError):
    """Branch continuation of log kappa lost track of the sheet."""


class ExtrapolationError(FreemultError):
    """Richardson extrapolation of boundary values failed to contract."""


class RootIsolationError(FreemultError):
    """Sign-change isolation for a representation root failed."""


class BracketError(FreemultError):
    """A bisection bracket did not straddle the target value."""


class PhaseError(FreemultError):
    """Boundary-map image failed its realness check on the half-line."""


class ModulusError(FreemultError):
    """Boundary-map image failed its unit-modulus check on the circle."""


class LocateError(FreemultError):
    """Atom image point could not be located on the boundary curve."""


class ContinuationError(FreemultError):
    """Subordination continuation ladder failed to converge."""


class SchemaError(FreemultError):
    """Measure or configuration input violated the serialization schema."""


class NonUniqueWarning(UserWarning):
    """A subordination solve found more than one admissible root; the
    branch chosen by continuity from the origin was returned."""
