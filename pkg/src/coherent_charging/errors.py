class DomainError(ValueError):
    """Raised when a parameter falls outside the region where a quantity is defined.

    Typical case: asking for the success branch of a protocol at ``p = 0``,
    where no non-ground component exists.
    """


class InvalidStateError(ValueError):
    """A matrix failed the density-matrix checks (Hermitian, unit trace, PSD)."""
