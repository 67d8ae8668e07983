"""Exception hierarchy shared by all modules."""


class GeometryError(Exception):
    """Base class for every error raised by frgeom."""


class DimensionError(GeometryError, ValueError):
    """Fields or weights defined on different grids."""


class DomainError(GeometryError, ValueError):
    """A coordinate or field lies outside the domain of an operation."""


class DegenerateMetricError(DomainError):
    """The metric coefficient C1 vanishes at the requested total mass."""


class ContractError(GeometryError, ValueError):
    """A tangent vector violates the tangency constraint of its base point."""


class UnknownPresetError(GeometryError, KeyError):
    pass


class QuadratureError(GeometryError, RuntimeError):
    """Adaptive quadrature did not converge.

    ``partial`` holds whatever partial sums were accumulated before failing.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class BoundaryHitError(GeometryError, RuntimeError):
    """A geodesic left the coordinate domain in finite time.

    This is the numerical signature of geodesic incompleteness.  ``path`` is
    the partial :class:`~frgeom.geodesics.GeodesicPath` up to the last valid
    sample and ``t_exit`` an estimate of the exit time.
    """

    def __init__(self, message, path=None, t_exit=None, boundary=None):
        super().__init__(message)
        self.path = path
        self.t_exit = t_exit
        self.boundary = boundary


class ConnectError(GeometryError, RuntimeError):
    """No connecting geodesic found; ``best`` carries the closest candidate."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class EmptyProfileError(GeometryError, ValueError):
    """The requested s-range contains no point where the embedding exists."""

    def __init__(self, message, profile=None):
        super().__init__(message)
        self.profile = profile


class ConfigError(GeometryError, ValueError):
    """Malformed or inconsistent run configuration."""
