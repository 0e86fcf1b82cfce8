"""Exception hierarchy for memcap."""


class MemcapError(Exception):
    """Base class for all library errors."""


class DomainError(MemcapError, ValueError):
    """An argument lies outside the domain where a formula is valid."""


class TruncationBudgetExceeded(MemcapError):
    """The coefficient series could not be truncated within the length cap."""


class BandTooWide(DomainError):
    """Band half-width N violates 2N < n."""


class ConvergenceFailure(MemcapError):
    """A dense decomposition failed to converge."""


class QuadratureBudgetExceeded(MemcapError):
    """Adaptive quadrature hit its subdivision cap before reaching tolerance."""


class ZeroCapacityRegion(DomainError):
    """The quantum capacity vanishes (M <= 1/2), so the requested object is trivial."""


class DivergentCapacity(DomainError):
    """Capacity is infinite at transmissivity 1."""


class UnreachableTarget(DomainError):
    """No number of channel uses reaches the target because the capacity is zero."""
