"""Exception hierarchy shared by all modules."""


class ExpanderError(Exception):
    """Base class for every error raised by expander_net."""


class StepSizeUnderflow(ExpanderError, ArithmeticError):
    """Adaptive step fell below the machine-scale threshold."""


class DomainTooShort(ExpanderError, ValueError):
    """Integration interval too short for the tail estimate to dominate."""


class NonpositiveTime(ExpanderError, ValueError):
    """Flow time must be strictly positive."""


class InvalidConfig(ExpanderError, ValueError):
    """Half-line configuration violates its invariants."""


class BracketFailure(ExpanderError):
    """Bracket expansion exceeded its bound without a sign change."""


class NoConvergence(ExpanderError):
    """An iterative solver did not converge."""


class ToleranceNotMet(ExpanderError):
    """A solver finished but its residual exceeds the requested tolerance."""


class CertificateFailure(ExpanderError):
    """The inward-pointing check on the sampling circle failed."""


class NoUniqueSmallestSegment(ExpanderError, ValueError):
    """Two sector angles tie, so the smallest sector is not unique."""


class NoIntersection(ExpanderError):
    """Curves that were expected to intersect do not."""


class StabilityViolation(ExpanderError, ValueError):
    """Time step to grid spacing ratio exceeds the configured bound."""


class ConfigMismatch(ExpanderError, ValueError):
    """Two networks are not asymptotic to the same half-lines."""


class DegenerateInput(ExpanderError, ValueError):
    """Inputs coincide, so the requested comparison is meaningless."""


class Unsupported(ExpanderError):
    """Geometric layout not covered by the diagnostic."""
