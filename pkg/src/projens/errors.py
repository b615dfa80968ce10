"""Shared exception types."""


class ContractError(ValueError):
    """An input violates a documented precondition (e.g. non-Hermitian matrix)."""


class SizeError(ValueError):
    """A requested object exceeds the configured dense-size limits."""


class DegenerateSampleError(ValueError):
    """A shadow sample has (numerically) zero conditional weight; resample."""
