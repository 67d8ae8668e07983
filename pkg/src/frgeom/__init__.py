"""Riemannian geometry of positive densities under the two-parameter
family of diffeomorphism-invariant metrics extending Fisher-Rao.

Points are discretized on a weighted grid.  Coordinates run from densities
to half-densities ``f = sqrt(mu / mu0)``, to polar form ``(r, phi)`` and to
arc length ``(s, phi)``, where every metric of the family becomes the warped
product ``ds^2 + a(s) <dphi, dphi>``.
"""
from .coeffs import (
    ArcProfile,
    CoefficientSpec,
    Expression,
    Term,
    arc_profile,
    make_preset,
    profile_for,
    pseudosphere_profile,
    radial_functions,
    round_sphere_profile,
    validate_positive_definite,
)
from .completeness import classify, completion_check, cone_spec, sphere_completion_from_g2
from .curvature import revolution_profile, sectional, sectional_fd_check, validity_condition
from .errors import (
    BoundaryHitError,
    ConfigError,
    ConnectError,
    DomainError,
    EmptyProfileError,
    GeometryError,
)
from .geodesics import GeodesicInitial, GeodesicPath, closed_form, connect, shoot, shoot_arc
from .manifold import DensityField, Grid, ScalarField, SpherePoint, sphere_distance
from .metric import G_bar_arc, G_bar_polar, G_density, G_tilde
from .transforms import ArcPoint, PolarPoint, polar, polar_inv

import types as _types

__all__ = sorted(
    n for n, v in globals().items() if not n.startswith("_") and not isinstance(v, _types.ModuleType)
)
__version__ = "0.1.0"
