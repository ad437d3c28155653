"""Exception hierarchy shared by all modules."""

__all__ = [
    "FrechetError",
    "CurveValidationError",
    "UnsupportedNorm",
    "ParameterOutOfRange",
    "IdenticallyZero",
    "WholeArcAtDistance",
    "ClusterUnresolved",
    "CriticalDelta",
    "AmbiguousProbe",
    "InconsistentConfiguration",
    "UnresolvedAtResolution",
    "DegenerateZero",
    "NearCriticalWarning",
]


class FrechetError(Exception):
    """Base class for all errors raised by this package."""


class CurveValidationError(FrechetError, ValueError):
    """A curve or piece violates its structural invariants."""


class UnsupportedNorm(FrechetError, ValueError):
    """Only the Euclidean norm (p = 2) is implemented."""


class ParameterOutOfRange(FrechetError, ValueError):
    """A numeric argument lies outside its admissible range."""


class IdenticallyZero(FrechetError):
    """A polynomial vanishes on the whole search interval."""


class WholeArcAtDistance(IdenticallyZero):
    """A whole piece lies on a sphere around the query point."""


class CriticalDelta(FrechetError):
    """The free-space boundary is degenerate at this distance value.

    Raised when the boundary touches a wall tangentially, an extremum lands
    on a cell wall, a solution cluster cannot be separated, or the
    combinatorial reconstruction is inconsistent.  Callers perturb the
    distance and retry.
    """


class ClusterUnresolved(CriticalDelta):
    """Solutions of a polynomial system could not be separated."""


class AmbiguousProbe(CriticalDelta):
    """All test points of a slope probe lie too close to the level set."""


class InconsistentConfiguration(CriticalDelta):
    """Counting or parity rules of the subcell matching were violated."""


class UnresolvedAtResolution(FrechetError):
    """A raster oracle cannot resolve features at the requested resolution."""


class DegenerateZero(FrechetError):
    """Both curves coincide up to the zero tolerance."""


class NearCriticalWarning(UserWarning):
    """Perturbation retries were exhausted; the answer is best effort."""
