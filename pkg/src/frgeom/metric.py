"""The invariant metric in its four representations.

* ``G_density``   on densities,
* ``G_tilde``     on half-density fields ``f = sqrt(mu/mu0)``,
* ``G_bar_polar`` on ``(r, phi)``,
* ``G_bar_arc``   on ``(s, phi)``.

All sums use :func:`~frgeom.manifold.fsum_product`, so every evaluator is
exactly invariant under permutations of the grid.
"""
from __future__ import annotations

from dataclasses import dataclass

from .coeffs import ArcProfile, CoefficientSpec, RadialFunctions
from .errors import ContractError, DomainError
from .manifold import (
    DensityField,
    ScalarField,
    fsum_product,
    integrate_density,
    l2_inner,
    same_grid,
)
from .transforms import ArcPoint, PolarPoint

TANGENCY_TOL = 1e-8


@dataclass(frozen=True)
class TangentAtDensity:
    base: DensityField
    vector: DensityField

    def __post_init__(self):
        same_grid(self.base, self.vector)


@dataclass(frozen=True)
class TangentAtPolar:
    """Tangent ``(dr, dphi)`` at a polar point; ``dphi`` is tangent to the sphere."""

    base: PolarPoint
    dr: float
    dphi: ScalarField

    def __post_init__(self):
        object.__setattr__(self, "dphi", project_tangent(self.base.phi.field, self.dphi))


@dataclass(frozen=True)
class TangentAtArc:
    base: ArcPoint
    ds: float
    dphi: ScalarField

    def __post_init__(self):
        object.__setattr__(self, "dphi", project_tangent(self.base.phi.field, self.dphi))


def project_tangent(phi: ScalarField, dphi: ScalarField) -> ScalarField:
    """Remove a small normal component from ``dphi``.

    Violations up to ``TANGENCY_TOL`` (relative to ``|dphi|``, absolute when
    ``dphi`` is tiny) are projected away; larger ones raise.
    """
    c = l2_inner(phi, dphi)
    if c == 0.0:
        return dphi
    scale = max(1.0, dphi.norm())
    if abs(c) > TANGENCY_TOL * scale:
        raise ContractError(f"dphi is not tangent to the sphere (<phi, dphi> = {c:.3e})")
    return dphi - phi * c


def G_density(base: DensityField, alpha: DensityField, beta: DensityField,
              spec: CoefficientSpec) -> float:
    """``C1(m) int (alpha/mu)(beta/mu) mu + C2(m) int alpha int beta``."""
    same_grid(base, alpha)
    same_grid(base, beta)
    if not base.is_positive:
        raise DomainError("the base density must be strictly positive")
    m = integrate_density(base)
    w = base.grid.weights
    mu = base.ratio
    first = fsum_product(w, (alpha.ratio / mu) * (beta.ratio / mu), mu)
    second = integrate_density(alpha) * integrate_density(beta)
    return float(spec.C1(m)) * first + float(spec.C2(m)) * second


def G_tilde(f: ScalarField, h: ScalarField, k: ScalarField, spec: CoefficientSpec) -> float:
    """``4 C1(|f|^2) <h, k> + 4 C2(|f|^2) <f, h> <f, k>``."""
    m = l2_inner(f, f)
    return 4 * float(spec.C1(m)) * l2_inner(h, k) + 4 * float(spec.C2(m)) * l2_inner(
        f, h
    ) * l2_inner(f, k)


def G_bar_polar(p: PolarPoint, v: TangentAtPolar, w: TangentAtPolar,
                rf: RadialFunctions) -> float:
    """``g1(r) <dphi_v, dphi_w> + g2(r) dr_v dr_w``."""
    return float(rf.g1(p.r)) * l2_inner(v.dphi, w.dphi) + float(rf.g2(p.r)) * v.dr * w.dr


def G_bar_arc(q: ArcPoint, v: TangentAtArc, w: TangentAtArc, profile: ArcProfile) -> float:
    """``a(s) <dphi_v, dphi_w> + ds_v ds_w``."""
    return float(profile.a(q.s)) * l2_inner(v.dphi, w.dphi) + v.ds * w.ds


def polar_tangent(f: ScalarField, h: ScalarField, p: PolarPoint) -> TangentAtPolar:
    """Push ``h`` at ``f`` through polar coordinates: ``dr = <phi, h>``,
    ``dphi = (h - <phi, h> phi) / r``."""
    phi = p.phi.field
    dr = l2_inner(phi, h)
    return TangentAtPolar(p, dr, (h - phi * dr) / p.r)


def arc_tangent(v: TangentAtPolar, q: ArcPoint, rf: RadialFunctions) -> TangentAtArc:
    """``ds = sqrt(g2(r)) dr``."""
    return TangentAtArc(q, float(rf.g2(v.base.r)) ** 0.5 * v.dr, v.dphi)
