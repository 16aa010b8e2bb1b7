"""Exception hierarchy shared by all heunspectra modules."""


class HeunSpectraError(Exception):
    """Base class for all package-specific errors."""


class NonInvertible(HeunSpectraError):
    """Parameter-convention map could not be inverted."""


class DegenerateGamma(HeunSpectraError):
    """gamma0 is zero or a negative integer; the power-series branch collides."""


class NoConvergence(HeunSpectraError):
    """An iteration (series, integrator or root finder) failed to converge."""


class PathTooClose(HeunSpectraError):
    """A continuation path passes too close to a singular point."""


class ExtremalNotSupported(HeunSpectraError):
    """Rotation parameter at or beyond the extremal limit a = M."""


class DerivationFailure(HeunSpectraError):
    """An assembled local solution failed its residual check."""


class EvaluationFailure(HeunSpectraError):
    """A function evaluation needed by a spectral condition failed."""


class PoleAtMatchPoint(HeunSpectraError):
    """Heun factor vanishes at a matching point; the residual has a pole there."""


class AlphaZero(HeunSpectraError):
    """Polynomial condition is undefined because the alpha parameter vanishes."""


class BranchInvalid(HeunSpectraError):
    """Requested radial branch is not valid for the given frequency/ray."""


class JacobianSingular(HeunSpectraError):
    """Newton Jacobian is numerically singular."""


class TrackLost(HeunSpectraError):
    """Continuation step size underflowed before reaching the target."""


class ConfigError(HeunSpectraError):
    """Run configuration failed to parse or validate."""


class ComputeError(HeunSpectraError):
    """A requested computation failed."""


class EmptyInput(HeunSpectraError):
    """An operation that requires data received none."""
