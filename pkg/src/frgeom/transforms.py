"""Coordinate chain ``Dens+ -> C(M, R>0) -> R>0 x S -> (W-, W+) x S``.

``R`` takes square roots of density ratios, ``polar`` splits a field into
its L2 norm and direction, and ``to_arc`` replaces the norm by arc length.
The sign-extended pair ``R_signed`` / ``R_inv_signed`` continues the chain to
densities that vanish or change sign.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coeffs import ArcProfile
from .errors import DomainError
from .manifold import DensityField, ScalarField, SpherePoint

ZERO_FIELD_TOL = 1e-10


@dataclass(frozen=True)
class PolarPoint:
    r: float
    phi: SpherePoint

    def __post_init__(self):
        if not self.r > 0:
            raise DomainError(f"polar radius must be positive, got {self.r!r}")
        object.__setattr__(self, "r", float(self.r))


@dataclass(frozen=True)
class ArcPoint:
    s: float
    phi: SpherePoint


def R_map(mu: DensityField) -> ScalarField:
    """``f = sqrt(mu / mu0)`` for strictly positive densities."""
    if not mu.is_positive:
        raise DomainError("R_map needs a strictly positive density; use R_signed")
    return ScalarField(np.sqrt(mu.ratio), mu.grid)


def R_inv(f: ScalarField) -> DensityField:
    return DensityField(f.values * f.values, f.grid)


def R_signed(mu: DensityField) -> ScalarField:
    """``sgn(mu) sqrt(|mu| / mu0)``."""
    a = mu.ratio
    return ScalarField(np.sign(a) * np.sqrt(np.abs(a)), mu.grid)


def R_inv_signed(f: ScalarField) -> DensityField:
    """``f |f| mu0``."""
    v = f.values
    return DensityField(v * np.abs(v), f.grid)


def dR_inv(f: ScalarField, h: ScalarField) -> DensityField:
    """Tangent map of ``R^{-1}``: ``h -> 2 f h mu0``."""
    return DensityField(2 * f.values * h.values, f.grid)


def dR(mu: DensityField, alpha: DensityField) -> ScalarField:
    """Tangent map of ``R`` at a positive density: ``alpha -> alpha / (2 f)``."""
    f = R_map(mu).values
    return ScalarField(alpha.ratio / (2 * f), mu.grid)


def polar(f: ScalarField) -> PolarPoint:
    r = f.norm()
    if r < ZERO_FIELD_TOL:
        raise DomainError("the zero field has no polar representation")
    return PolarPoint(r, SpherePoint(f / r))


def polar_inv(p: PolarPoint) -> ScalarField:
    return p.phi.field * p.r


def to_arc(p: PolarPoint, profile: ArcProfile) -> ArcPoint:
    s = float(profile.W(p.r))
    if not profile.contains(s):
        raise DomainError(f"r={p.r!r} maps outside the profile domain")
    return ArcPoint(s, p.phi)


def from_arc(q: ArcPoint, profile: ArcProfile) -> PolarPoint:
    return PolarPoint(float(profile.W_inv(q.s)), q.phi)
