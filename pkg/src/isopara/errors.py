"""Exception types shared across the toolkit."""


class IsoparError(Exception):
    """Base class for all toolkit errors."""


class NonFinite(IsoparError):
    """A matrix or vector contains NaN or infinite entries."""


class NoConvergence(IsoparError):
    """An iterative method hit its iteration cap."""

    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class DegenerateSpectrum(IsoparError):
    """Eigenvalue gap too small for a covariant / pseudo-inverse formula."""


class SingularJacobian(IsoparError):
    """Newton iterates collided; the moment map Jacobian is singular."""


class OutOfDomain(IsoparError):
    """Argument outside the open interval a profile is defined on."""


class OutOfRange(IsoparError):
    """Value not attained by a monotone map; no bracket exists."""


class NonPositiveFk(IsoparError):
    """The shifted arclength coordinate F_k dropped to <= 0."""


class PoleCrossed(IsoparError):
    """The product integrand hits a pole on the integration path."""


class RankOutOfRange(IsoparError):
    """Requested projection rank outside 0..n."""


class InvalidSpec(IsoparError):
    """Field specification violates a type invariant."""


class AxisTooClose(IsoparError):
    """Probe point within the exclusion margin of the cylinder axis."""


class StepTooSmall(IsoparError):
    """Finite-difference step below the roundoff floor."""


class CriticalPoint(IsoparError):
    """Gradient norm below the regularity threshold."""


class GroupingAmbiguous(IsoparError):
    """Eigenvalue gaps straddle the grouping tolerance."""

    def __init__(self, message, gaps=None):
        super().__init__(message)
        self.gaps = gaps


class FocalPoint(IsoparError):
    """1 + t*kappa vanishes: level-set curvature blows up."""


class InadmissibleSegment(IsoparError):
    """A flow segment leaves the admissible region."""


class InadmissibleStencil(IsoparError):
    """A finite-difference stencil point could not be evaluated."""


class DomainExit(IsoparError):
    """Gradient flow left the queried domain."""


class ProfileRangeExceeded(IsoparError):
    """Sample value outside the tabulated profile's range."""
