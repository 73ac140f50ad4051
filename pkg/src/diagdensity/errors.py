"""Exception types shared across the package."""


class ResourceError(RuntimeError):
    """A requested computation exceeds a configured memory or work budget."""


class TableRangeError(ValueError):
    """A query reaches past the end of a precomputed table."""
