"""Exception types shared across the library."""


class LimitDPError(Exception):
    """Base class for all library errors."""


class InvalidEvaluationError(LimitDPError):
    """Stage weights are negative, unnormalized, or otherwise malformed."""


class DegenerateEvaluationError(LimitDPError):
    """Operation undefined for this evaluation (e.g. shifting a stage-1 Dirac)."""


class InvalidInstanceError(LimitDPError):
    """Problem or house violates its invariants (empty successor set, reward outside [0,1], ...)."""


class UnknownStateError(LimitDPError):
    """State is not part of the instance."""


class NotUncontrolledError(LimitDPError):
    """Operation requires a single-valued transition map."""


class HorizonError(LimitDPError):
    """Evaluation support exceeds the requested enumeration horizon."""


class EnumerationGuardError(LimitDPError):
    """Brute-force enumeration exceeded its leaf-count guard."""


class ConfigError(LimitDPError):
    """Malformed CLI configuration."""
