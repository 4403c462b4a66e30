"""Exception and warning types shared across the package."""


class WeakDiscError(Exception):
    """Base class for all package errors."""


class UnphysicalStateError(WeakDiscError, ValueError):
    """Input violates a state or vector constraint (norm, trace, positivity)."""


class DegeneratePostselectionError(WeakDiscError):
    """Postselection succeeds with (numerically) zero probability."""

    def __init__(self, message, probability=0.0):
        super().__init__(message)
        self.probability = probability


class RegimeError(WeakDiscError, ValueError):
    """Parameters fall outside the range where an approximate formula holds."""


class NoDiscriminationError(WeakDiscError, ValueError):
    """The two states are identical, so there is nothing to discriminate."""


class ZeroProbabilityBranchWarning(UserWarning):
    """A pointer state was returned for a postselection branch of probability zero."""


class PovmPositivityWarning(UserWarning):
    """A constructed POVM element has a negative eigenvalue beyond tolerance."""


class DegeneratePairWarning(UserWarning):
    """The two states handed to a POVM builder coincide."""
