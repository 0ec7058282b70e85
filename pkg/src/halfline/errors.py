"""Exception types shared across the package."""


class HalflineError(ValueError):
    """Base class for rejections raised by halfline operations."""


class GridMismatchError(HalflineError):
    """Two objects live on incompatible lattices."""


class RegimeError(HalflineError):
    """Parameters violate the stated hypothesis of an estimate or operation."""


class QuadratureError(HalflineError):
    """A quadrature failed to converge to the requested tolerance."""


class DataError(HalflineError):
    """Input samples violate a precondition (decay, resolution, support)."""
