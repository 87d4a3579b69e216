"""Exception hierarchy shared by all modules."""


class RobboError(Exception):
    """Base class for all domain errors raised by this package."""


class InvalidToleranceError(RobboError):
    """A tolerance entry is non-positive or non-finite."""


class InsufficientDataError(RobboError):
    """Fewer samples than the two anchor points."""


class NonParetoDatasetError(RobboError):
    """Samples violate mutual non-dominance (z2 not strictly decreasing in z1)."""


class DuplicateSampleError(RobboError):
    """Two samples share the same v-coordinate up to the dedup tolerance."""


class OutOfDomainError(RobboError):
    """Query coordinate lies outside the anchor v-span."""


class InconsistentSampleError(RobboError):
    """A returned sample contradicts the current optimal bounds or the v-match tolerance."""


class SamplerFailureError(RobboError):
    """The sampling backend failed (solver error, plugin crash, malformed reply, timeout)."""


class UnsupportedBaselineError(RobboError):
    """Baseline strategy requested on a backend that cannot support it."""
