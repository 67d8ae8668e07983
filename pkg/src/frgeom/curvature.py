"""Sectional curvatures of ``ds^2 + a(s) <dphi, dphi>`` and the revolution profile."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .coeffs import ArcProfile
from .errors import DomainError, EmptyProfileError

# a'^2 within this relative distance of 4a counts as the flat boundary case
VALIDITY_RTOL = 1e-9


@dataclass(frozen=True)
class CurvaturePair:
    """``sec_sphere``: plane of two sphere directions; ``sec_mixed``: plane of
    ``d/ds`` and a sphere direction."""

    sec_sphere: float
    sec_mixed: float
    at_s: float


def _formulas(a, da, dda):
    sec_sphere = 1.0 / a - da * da / (4 * a * a)
    sec_mixed = -dda / (2 * a) + da * da / (4 * a * a)
    return sec_sphere, sec_mixed


def sectional(profile: ArcProfile, s: float) -> CurvaturePair:
    a, da, dda = (float(x) for x in profile.derivs(s))
    if not a > 0:
        raise DomainError(f"a(s) = {a!r} is not positive at s={s!r}")
    sec_sphere, sec_mixed = _formulas(a, da, dda)
    return CurvaturePair(sec_sphere, sec_mixed, float(s))


def sectional_table(profile: ArcProfile, s_values) -> np.ndarray:
    """Rows ``(s, a, a', a'', sec_sphere, sec_mixed, valid)``."""
    s_values = np.asarray(s_values, dtype=float)
    a, da, dda = (np.asarray(x, dtype=float) for x in profile.derivs(s_values))
    sec_sphere, sec_mixed = _formulas(a, da, dda)
    valid = _valid(a, da)
    return np.column_stack([s_values, a, da, dda, sec_sphere, sec_mixed, valid])


def gauss_curvature_fd(profile: ArcProfile, s: float, h: float) -> float:
    """``K = -(sqrt a)'' / sqrt a`` by a central second difference."""
    lo, hi = profile.s_bounds
    if not (lo < s - h and s + h < hi):
        raise DomainError(f"[s-h, s+h] = [{s - h!r}, {s + h!r}] leaves {profile.s_bounds}")
    sm, s0, sp = (math.sqrt(float(profile.a(x))) for x in (s - h, s, s + h))
    return -(sp - 2 * s0 + sm) / (h * h) / s0


def sectional_fd_check(profile: ArcProfile, s: float, h: float = 1e-4) -> float:
    """``|K_fd - sec_mixed|`` with ``K_fd`` the Gauss curvature of ``ds^2 + a dtheta^2``."""
    return abs(gauss_curvature_fd(profile, s, h) - sectional(profile, s).sec_mixed)


def _valid(a, da):
    a = np.asarray(a, dtype=float)
    da = np.asarray(da, dtype=float)
    return (a > 0) & (da * da < 4 * a * (1 - VALIDITY_RTOL))


def validity_condition(profile: ArcProfile, s: float) -> bool:
    """``a'(s)^2 < 4 a(s)``, i.e. ``sec_sphere > 0``; the flat case is invalid."""
    a, da = profile.a_da(s)
    return bool(_valid(a, da))


@dataclass(frozen=True, eq=False)
class ProfileCurve:
    """Meridian ``(c1(s), c2(s))`` of the hypersurface of revolution.

    ``c2 = sqrt(a)``; ``c1`` integrates ``sqrt(1 - a'^2 / 4a)`` and is NaN
    where ``valid`` is false.
    """

    s_samples: np.ndarray
    c1_vals: np.ndarray
    c2_vals: np.ndarray
    valid: np.ndarray

    def rows(self):
        return zip(self.s_samples, self.c1_vals, self.c2_vals, self.valid)


def revolution_profile(profile: ArcProfile, s_range, n: int = 201) -> ProfileCurve:
    """Sample the revolution profile on ``n`` points of ``s_range``.

    ``c1`` is anchored at ``s = 0`` when 0 lies in the profile domain,
    otherwise at the start of ``s_range``.  Raises
    :class:`EmptyProfileError` (carrying the all-invalid curve) when no
    sample satisfies ``a'^2 < 4a``.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    s = np.linspace(float(s_range[0]), float(s_range[1]), n)
    a, da = (np.asarray(x, dtype=float) for x in profile.a_da(s))
    valid = _valid(a, da)
    c2 = np.sqrt(a)
    if not valid.any():
        raise EmptyProfileError(
            "a'^2 >= 4a on the whole range; no embedding",
            ProfileCurve(s, np.full(n, np.nan), c2, valid),
        )

    def slope(x):
        ax, dax = (float(v) for v in profile.a_da(x))
        return math.sqrt(max(0.0, 1.0 - dax * dax / (4 * ax)))

    anchor = 0.0 if bool(profile.contains(0.0)) else s[0]
    c1 = np.empty(n)
    # integrate between consecutive samples outward from the anchor
    knots = np.unique(np.r_[s, anchor])
    k0 = int(np.searchsorted(knots, anchor))
    acc = np.zeros(knots.size)
    for k in range(k0 + 1, knots.size):
        acc[k] = acc[k - 1] + integrate.quad(slope, knots[k - 1], knots[k], epsabs=1e-13,
                                             epsrel=1e-12, limit=200)[0]
    for k in range(k0 - 1, -1, -1):
        acc[k] = acc[k + 1] - integrate.quad(slope, knots[k], knots[k + 1], epsabs=1e-13,
                                             epsrel=1e-12, limit=200)[0]
    c1[:] = acc[np.searchsorted(knots, s)]
    c1[~valid] = np.nan
    return ProfileCurve(s, c1, c2, valid)


def tractrix_c1(s) -> np.ndarray:
    """Closed form of ``int_0^s sqrt(1 - exp(-2 t)) dt`` for ``s >= 0``."""
    s = np.asarray(s, dtype=float)
    return np.arccosh(np.exp(s)) - np.sqrt(1 - np.exp(-2 * s))
