"""Exception types shared across the package."""


class RemlabError(Exception):
    """Base class for all remlab errors."""


class SpecValidationError(RemlabError, ValueError):
    """A model specification (or an input tied to one) violates an invariant."""


class DisorderValidationError(RemlabError, ValueError):
    """A disorder family failed construction checks or self-validation."""


class DimensionMismatchError(RemlabError, ValueError):
    """A point or box does not match the coordinate space of the model."""


class EnumerationCapError(RemlabError):
    """The requested system size exceeds the exact-enumeration cap."""


class UnboundedSupportError(RemlabError):
    """A rate function sublevel set is unbounded, so the variational
    supremum cannot be bracketed and the solve is refused."""
