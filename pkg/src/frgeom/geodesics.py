"""Geodesics: initial-value shooting, closed forms and two-point connection.

Geodesics of ``g1(r) <dphi, dphi> + g2(r) dr^2`` follow great circles of the
sphere, ``phi(t) = cos(theta(t)) phi0 + sin(theta(t)) psi_hat``, so the flow
reduces to the two scalar unknowns ``r`` (or ``s``) and ``theta``:

    r_tt     = g1'(r) theta_t^2 / (2 g2(r)) - g2'(r) r_t^2 / (2 g2(r))
    theta_tt = -(g1'(r) / g1(r)) r_t theta_t

and in arc length ``s_tt = a'(s) theta_t^2 / 2``.  ``A0 = g1(r) theta_t``
and the energy are conserved; their drift is recorded on every path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .coeffs import ArcProfile, CoefficientSpec, profile_for, radial_functions
from .errors import BoundaryHitError, ConnectError, DomainError
from .manifold import ScalarField, SpherePoint, l2_inner, orthonormal_direction, sphere_distance
from .metric import project_tangent
from .transforms import PolarPoint

ARC_SWITCH_THRESHOLD = 1e3


@dataclass(frozen=True)
class GeodesicInitial:
    """Initial point ``(r0, phi0)``, radial speed ``r_t0`` and ``phi_t(0) = psi0``."""

    p0: PolarPoint
    r_t0: float
    psi0: ScalarField

    def __post_init__(self):
        object.__setattr__(self, "psi0", project_tangent(self.p0.phi.field, self.psi0))

    @classmethod
    def in_plane(cls, p0: PolarPoint, r_t0: float, psi_norm: float = 1.0,
                 direction: ScalarField | None = None) -> "GeodesicInitial":
        """Initial data with ``|psi0| = psi_norm`` along ``direction`` (projected)."""
        phi = p0.phi.field
        if direction is None:
            u = orthonormal_direction(p0.phi)
        else:
            u = direction - phi * l2_inner(phi, direction)
            u = u / u.norm()
        return cls(p0, float(r_t0), u * float(psi_norm))

    @property
    def psi_norm(self) -> float:
        return self.psi0.norm()

    @property
    def psi_hat(self) -> ScalarField:
        n = self.psi_norm
        if n == 0.0:
            return orthonormal_direction(self.p0.phi)
        return self.psi0 / n


@dataclass(frozen=True)
class ReducedState:
    s: float
    s_t: float
    theta: float
    theta_t: float
    r: float | None = None
    r_t: float | None = None


def _drift(series: np.ndarray) -> float:
    x0 = series[0]
    dev = np.max(np.abs(series - x0))
    return float(dev / abs(x0)) if x0 != 0 else float(dev)


@dataclass(frozen=True, eq=False)
class GeodesicPath:
    """Sampled geodesic in reduced coordinates plus the great-circle frame.

    ``a`` holds the warping function along the path (``g1(r)`` or
    ``a(s)``), from which the invariants are evaluated.  ``r`` and ``r_t``
    are ``None`` for profiles without a radial realization.
    """

    times: np.ndarray
    s: np.ndarray
    s_t: np.ndarray
    theta: np.ndarray
    theta_t: np.ndarray
    a: np.ndarray
    r: np.ndarray | None = None
    r_t: np.ndarray | None = None
    phi0: SpherePoint | None = None
    psi_hat: ScalarField | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.times.size > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("path times must be strictly increasing")

    def __len__(self):
        return self.times.size

    def state(self, k: int) -> ReducedState:
        r = None if self.r is None else float(self.r[k])
        r_t = None if self.r_t is None else float(self.r_t[k])
        return ReducedState(float(self.s[k]), float(self.s_t[k]), float(self.theta[k]),
                            float(self.theta_t[k]), r, r_t)

    @property
    def A0_series(self) -> np.ndarray:
        return self.a * self.theta_t

    @property
    def energy_series(self) -> np.ndarray:
        return 0.5 * (self.a * self.theta_t ** 2 + self.s_t ** 2)

    @property
    def first_integral_series(self) -> np.ndarray:
        """``s_t^2 + A0^2 / a(s)`` with ``A0`` frozen at its initial value."""
        A0 = self.A0_series[0]
        return self.s_t ** 2 + A0 * A0 / self.a

    @property
    def drift(self) -> dict:
        return {
            "A0": _drift(self.A0_series),
            "energy": _drift(self.energy_series),
            "first_integral": _drift(self.first_integral_series),
        }

    invariant_drift = drift

    def A0_drift_series(self) -> np.ndarray:
        A = self.A0_series
        scale = abs(A[0]) if A[0] != 0 else 1.0
        return (A - A[0]) / scale

    def phi(self, k: int) -> ScalarField:
        """``cos(theta) phi0 + sin(theta) psi_hat`` at sample ``k``."""
        if self.phi0 is None:
            raise DomainError("path has no sphere frame")
        th = float(self.theta[k])
        return self.phi0.field * math.cos(th) + self.psi_hat * math.sin(th)

    def field(self, k: int) -> ScalarField:
        if self.r is None:
            raise DomainError("path has no radial coordinate")
        return self.phi(k) * float(self.r[k])

    def planar(self):
        """``(x, y) = r (cos theta, sin theta)`` in the frame ``{phi0, psi_hat}``."""
        if self.r is None:
            raise DomainError("path has no radial coordinate")
        return self.r * np.cos(self.theta), self.r * np.sin(self.theta)

    def columns(self, include_fields: bool = False):
        cols = {
            "t": self.times,
            "s": self.s,
            "r": self.r if self.r is not None else np.full(self.times.shape, np.nan),
            "theta": self.theta,
            "s_t": self.s_t,
            "theta_t": self.theta_t,
            "A0_drift": self.A0_drift_series(),
        }
        if include_fields:
            if self.phi0 is None or self.r is None:
                raise DomainError("per-point field values need a frame and a radius")
            phi0 = self.phi0.values
            psi = self.psi_hat.values
            fields = self.r[:, None] * (
                np.cos(self.theta)[:, None] * phi0 + np.sin(self.theta)[:, None] * psi
            )
            for i in range(phi0.size):
                cols[f"f_{i}"] = fields[:, i]
        return cols


# ---------------------------------------------------------------------------
# fixed-step integration
# ---------------------------------------------------------------------------

class _LeftDomain(Exception):
    pass


def _rk4(rhs, y0, t_end, n_steps):
    """Classical RK4; returns ``(times, states, exit)`` where ``exit`` is
    ``None`` or the index of the last valid sample when ``rhs`` left the domain."""
    h = t_end / n_steps
    ys = np.empty((n_steps + 1, len(y0)))
    ys[0] = y0
    y = np.asarray(y0, dtype=float)
    for k in range(n_steps):
        try:
            k1 = rhs(y)
            k2 = rhs(y + 0.5 * h * k1)
            k3 = rhs(y + 0.5 * h * k2)
            k4 = rhs(y + h * k3)
            y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
            rhs(y)  # validates the new state
        except _LeftDomain:
            return np.linspace(0.0, h * k, k + 1), ys[: k + 1], k
        ys[k + 1] = y
    return np.linspace(0.0, t_end, n_steps + 1), ys, None


def _adaptive(rhs, y0, t_end, n_steps, coord_bounds):
    """DOP853 with dense output sampled on the RK4 grid; same return shape as :func:`_rk4`."""
    lo, hi = coord_bounds
    times = np.linspace(0.0, t_end, n_steps + 1)
    last = {"t": 0.0}

    def f(t, y):
        last["t"] = t
        return rhs(y)

    def leave(t, y):
        return min(y[0] - lo, hi - y[0])

    leave.terminal = True
    try:
        sol = integrate.solve_ivp(f, (0.0, t_end), y0, method="DOP853", rtol=1e-12,
                                  atol=1e-14, dense_output=True, events=leave)
        t_stop = sol.t[-1] if sol.status == 1 else t_end
    except _LeftDomain:
        sol, t_stop = None, last["t"]
    if sol is None or t_stop < t_end:
        keep = times[times < t_stop]
        if sol is None:
            return keep[:1], np.asarray([y0], dtype=float), 0
        ys = sol.sol(keep).T
        return keep, ys, keep.size - 1
    return times, sol.sol(times).T, None


def _exit_time(t_k, x, v, acc, lo, hi, h):
    """Earliest ``tau > 0`` with ``x + v tau + acc tau^2 / 2`` on a boundary."""
    best = None
    for b in (lo, hi):
        if not math.isfinite(b):
            continue
        # 0.5 acc tau^2 + v tau + (x - b) = 0
        c = x - b
        if abs(acc) < 1e-300:
            roots = [-c / v] if v != 0 else []
        else:
            disc = v * v - 2 * acc * c
            if disc < 0:
                continue
            sq = math.sqrt(disc)
            roots = [(-v - sq) / acc, (-v + sq) / acc]
        for tau in roots:
            if tau > 0 and (best is None or tau < best):
                best = tau
    if best is None:
        best = h
    return t_k + best


def shoot(init: GeodesicInitial, spec: CoefficientSpec, t_end: float, n_steps: int = 1000,
          profile: ArcProfile | None = None, adaptive: bool = False) -> GeodesicPath:
    """Integrate the geodesic with initial data ``init`` up to ``t_end``.

    Integrates ``(r, r_t, alpha, alpha_t)`` with ``theta = |psi0| alpha`` and
    ``alpha_tt = -(g1'/g1) r_t alpha_t``, ``alpha(0) = 0``, ``alpha_t(0) = 1``.
    Switches to arc-length coordinates when ``|g2'/g2| > 1e3`` at ``r0``.

    ``adaptive=True`` swaps the fixed-step scheme for DOP853 sampled on
    the same time grid.

    Raises :class:`BoundaryHitError` (carrying the partial path) when ``r``
    leaves ``[1e-8, 1e8]`` or the radial domain of ``spec``.
    """
    if n_steps < 8:
        raise ValueError("n_steps must be at least 8")
    rf = radial_functions(spec)
    r0 = init.p0.r
    n_psi = init.psi_norm
    if profile is None:
        profile = profile_for(spec)

    _, _, g2_0, dg2_0 = rf.values(r0)
    if abs(dg2_0 / g2_0) > ARC_SWITCH_THRESHOLD:
        path = shoot_arc(float(profile.W(r0)), math.sqrt(g2_0) * init.r_t0, n_psi, profile,
                         t_end, n_steps, adaptive)
        r = np.asarray(profile.W_inv(path.s), dtype=float)
        r_t = path.s_t / np.sqrt(rf.g2(r))
        return GeodesicPath(path.times, path.s, path.s_t, path.theta, path.theta_t, path.a,
                            r, r_t, init.p0.phi, init.psi_hat, {"coords": "s"})

    lo = max(rf.r_bounds[0], spec.r_domain[0])
    hi = min(rf.r_bounds[1], spec.r_domain[1])
    interior_lo = spec.r_domain[0] > 0

    def rhs(y):
        r, v, _, alt = y
        if not (math.isfinite(r) and (r > lo if interior_lo else r >= lo) and r <= hi):
            raise _LeftDomain
        g1, dg1, g2, dg2 = rf.values(r)
        g1, dg1, g2, dg2 = float(g1), float(dg1), float(g2), float(dg2)
        if not (g1 > 0 and g2 > 0):
            raise _LeftDomain
        th_t = n_psi * alt
        return np.array([
            v,
            0.5 * dg1 * th_t * th_t / g2 - 0.5 * dg2 * v * v / g2,
            alt,
            -(dg1 / g1) * v * alt,
        ])

    if adaptive:
        times, ys, exit_k = _adaptive(rhs, [r0, init.r_t0, 0.0, 1.0], t_end, n_steps, (lo, hi))
    else:
        times, ys, exit_k = _rk4(rhs, [r0, init.r_t0, 0.0, 1.0], t_end, n_steps)
    r, r_t = ys[:, 0], ys[:, 1]
    g1, _, g2, _ = rf.values(r)
    path = GeodesicPath(
        times, np.asarray(profile.W(r), dtype=float), np.sqrt(g2) * r_t,
        n_psi * ys[:, 2], n_psi * ys[:, 3], np.asarray(g1, dtype=float), r, r_t,
        init.p0.phi, init.psi_hat, {"coords": "r"},
    )
    if exit_k is not None:
        y = ys[exit_k]
        acc = rhs(y)[1]
        t_exit = _exit_time(times[-1], y[0], y[1], acc, lo, hi, t_end / n_steps)
        raise BoundaryHitError(
            f"geodesic left the radial domain near t={t_exit:.6g}", path, t_exit,
            "zero" if y[1] < 0 else "infinity",
        )
    return path


def shoot_arc(s0: float, s_t0: float, theta_t0: float, profile: ArcProfile, t_end: float,
              n_steps: int = 1000, adaptive: bool = False) -> GeodesicPath:
    """Integrate ``s_tt = a'(s) theta_t^2 / 2``, ``theta_tt = -(a'/a) s_t theta_t``.

    ``A0 = a(s0) theta_t0``.  Raises :class:`BoundaryHitError` with an exit
    time estimate when ``s`` leaves ``profile.s_bounds``.
    """
    if n_steps < 8:
        raise ValueError("n_steps must be at least 8")
    lo, hi = profile.s_bounds
    if not lo < s0 < hi:
        raise DomainError(f"s0={s0!r} outside the profile domain {profile.s_bounds}")

    def rhs(y):
        s, v, _, th_t = y
        if not (math.isfinite(s) and lo < s < hi):
            raise _LeftDomain
        a, da = profile.a_da(s)
        a, da = float(a), float(da)
        if not a > 0:
            raise _LeftDomain
        return np.array([v, 0.5 * da * th_t * th_t, th_t, -(da / a) * v * th_t])

    if adaptive:
        times, ys, exit_k = _adaptive(rhs, [s0, s_t0, 0.0, theta_t0], t_end, n_steps, (lo, hi))
    else:
        times, ys, exit_k = _rk4(rhs, [s0, s_t0, 0.0, theta_t0], t_end, n_steps)
    a = np.asarray(profile.a(ys[:, 0]), dtype=float)
    r = r_t = None
    if profile.rf is not None:
        r = np.asarray(profile.W_inv(ys[:, 0]), dtype=float)
        r_t = ys[:, 1] / np.sqrt(profile.rf.g2(r))
    path = GeodesicPath(times, ys[:, 0], ys[:, 1], ys[:, 2], ys[:, 3], a, r, r_t,
                        meta={"coords": "s"})
    if exit_k is not None:
        y = ys[exit_k]
        acc = rhs(y)[1]
        t_exit = _exit_time(times[-1], y[0], y[1], acc, lo, hi, t_end / n_steps)
        raise BoundaryHitError(
            f"geodesic left ({lo:g}, {hi:g}) near t={t_exit:.6g}", path, t_exit,
            "zero" if y[1] < 0 else "infinity",
        )
    return path


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def closed_form(preset: str, init: GeodesicInitial, t: float) -> ReducedState:
    """Exact geodesic state for the ``reciprocal`` and ``fisher_rao`` presets.

    reciprocal: ``r = r0 exp(r_t0 t / r0)`` and ``theta = |psi0| t``.
    fisher_rao: the straight line ``f0 + t v`` with ``v = r_t0 phi0 + r0 psi0``.
    """
    r0, c, n = init.p0.r, init.r_t0, init.psi_norm
    if preset == "reciprocal":
        r = r0 * math.exp(c * t / r0)
        r_t = c * math.exp(c * t / r0)
        return ReducedState(2 * math.log(r), 2 * r_t / r, n * t, n, r, r_t)
    if preset == "fisher_rao":
        x, y = r0 + c * t, r0 * n * t
        r = math.hypot(x, y)
        r_t = (x * c + y * r0 * n) / r
        theta = math.atan2(y, x)
        theta_t = r0 * r0 * n / (r * r)
        return ReducedState(2 * (r - 1), 2 * r_t, theta, theta_t, r, r_t)
    raise DomainError(f"no closed form for preset {preset!r}")


# ---------------------------------------------------------------------------
# two-point problem
# ---------------------------------------------------------------------------

def _theta_flow(profile: ArcProfile, s0: float, betas: np.ndarray, theta1: float, n: int,
                record: bool = False):
    """Integrate unit-speed geodesics from ``(s0, 0)`` with angle ``beta`` to
    ``theta = theta1``, using ``theta`` as the independent variable.

    With ``p = s_t`` and ``A0 = sqrt(a(s0)) sin(beta)``:
    ``ds/dtheta = a p / A0``, ``dp/dtheta = A0 a' / (2a)``, ``dt/dtheta = a / A0``.

    Returns ``(s_end, length, alive, heading, trajectory)``; ``heading`` is the
    sign of ``p`` when a trajectory left the domain.
    """
    betas = np.asarray(betas, dtype=float)
    a0 = float(profile.a(s0))
    A0 = math.sqrt(a0) * np.sin(betas)
    s = np.full(betas.shape, float(s0))
    p = np.cos(betas)
    t = np.zeros(betas.shape)
    alive = np.ones(betas.shape, dtype=bool)
    heading = np.zeros(betas.shape)
    h = theta1 / n
    traj = [(s.copy(), p.copy(), t.copy())] if record else None

    def f(s, p):
        a, da = profile.a_masked(s)
        return a * p / A0, A0 * da / (2 * a), a / A0

    with np.errstate(all="ignore"):
        for _ in range(n):
            k1 = f(s, p)
            k2 = f(s + 0.5 * h * k1[0], p + 0.5 * h * k1[1])
            k3 = f(s + 0.5 * h * k2[0], p + 0.5 * h * k2[1])
            k4 = f(s + h * k3[0], p + h * k3[1])
            s_new = s + (h / 6) * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
            p_new = p + (h / 6) * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
            t_new = t + (h / 6) * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
            ok = np.isfinite(s_new) & np.isfinite(p_new) & np.isfinite(t_new)
            ok &= profile.contains(np.where(ok, s_new, s0))
            died = alive & ~ok
            heading[died] = np.sign(p[died])
            alive &= ok
            s = np.where(alive, s_new, s)
            p = np.where(alive, p_new, p)
            t = np.where(alive, t_new, t)
            if record:
                traj.append((s.copy(), p.copy(), t.copy()))
    return s, t, alive, heading, traj


def _mismatch(profile, s0, s1, theta1, betas, n):
    s_end, length, alive, heading, _ = _theta_flow(profile, s0, betas, theta1, n)
    # dead trajectories overshoot in the direction they were heading
    F = np.where(alive, s_end - s1, np.where(heading > 0, np.inf, -np.inf))
    return F, length


def _refine(profile, s0, s1, theta1, lo, hi, Flo, Fhi, n, tol, max_iter):
    """Illinois regula falsi on all brackets at once (bisection next to +-inf)."""
    lo, hi, Flo, Fhi = (np.array(x, dtype=float) for x in (lo, hi, Flo, Fhi))
    side = np.zeros(lo.shape)
    best = np.where(np.abs(Flo) < np.abs(Fhi), lo, hi)
    Fbest = np.minimum(np.abs(Flo), np.abs(Fhi))
    iters = 0
    for iters in range(1, max_iter + 1):
        active = Fbest > tol
        if not np.any(active):
            break
        finite = np.isfinite(Flo) & np.isfinite(Fhi)
        with np.errstate(all="ignore"):
            sec = hi - Fhi * (hi - lo) / (Fhi - Flo)
        mid = 0.5 * (lo + hi)
        x = np.where(finite & np.isfinite(sec) & (sec > lo) & (sec < hi), sec, mid)
        Fx, _ = _mismatch(profile, s0, s1, theta1, x, n)
        improve = np.abs(Fx) < Fbest
        best = np.where(improve & active, x, best)
        Fbest = np.where(improve & active, np.abs(Fx), Fbest)
        same_as_lo = np.sign(Fx) == np.sign(Flo)
        # Illinois: halve the retained endpoint value when the same side is kept twice
        upd_lo = active & same_as_lo
        upd_hi = active & ~same_as_lo
        Fhi = np.where(upd_lo & (side == 1), Fhi / 2, Fhi)
        Flo = np.where(upd_hi & (side == -1), Flo / 2, Flo)
        lo, Flo = np.where(upd_lo, x, lo), np.where(upd_lo, Fx, Flo)
        hi, Fhi = np.where(upd_hi, x, hi), np.where(upd_hi, Fx, Fhi)
        side = np.where(upd_lo, 1, np.where(upd_hi, -1, side))
        if np.all((hi - lo)[active] < 1e-16):
            break
    return best, Fbest, iters


def _secant_polish(profile, s0, s1, theta1, beta, n, tol, max_iter):
    """Newton-secant correction of a known root at a finer resolution."""
    x0, x1 = beta, beta + 1e-7
    F0 = _mismatch(profile, s0, s1, theta1, np.array([x0]), n)[0][0]
    F1 = _mismatch(profile, s0, s1, theta1, np.array([x1]), n)[0][0]
    it = 0
    for it in range(1, max_iter + 1):
        if abs(F1) <= tol or not (math.isfinite(F0) and math.isfinite(F1)) or F1 == F0:
            break
        x0, x1, F0 = x1, x1 - F1 * (x1 - x0) / (F1 - F0), F1
        F1 = _mismatch(profile, s0, s1, theta1, np.array([x1]), n)[0][0]
    return x1, F1, it


def solve_plane(profile: ArcProfile, s0: float, s1: float, theta1: float, tol: float = 1e-9,
                n_starts: int = 32, max_iter: int = 200, n_steps: int = 64,
                max_steps: int = 16384):
    """Shortest geodesic from ``(s0, 0)`` to ``(s1, theta1)`` in ``ds^2 + a dtheta^2``.

    ``0 < theta1 <= pi``.  Shoots over a fan of ``n_starts`` initial angles,
    refines every bracketed root, keeps the shortest, then doubles the step
    count until the estimated length error ``|dL| / 15`` is below ``tol``.

    Returns ``(beta, length, n, iterations, mismatch)``.
    """
    betas = math.pi * (np.arange(n_starts) + 0.5) / n_starts
    F, L = _mismatch(profile, s0, s1, theta1, betas, n_steps)
    sgn = np.sign(F)
    idx = np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]
    roots = [k for k in range(n_starts) if F[k] == 0]
    iterations = 0
    candidates = []
    if idx.size:
        b, Fb, it = _refine(profile, s0, s1, theta1, betas[idx], betas[idx + 1],
                            F[idx], F[idx + 1], n_steps, tol, max_iter)
        iterations += it
        candidates += [(bb, ff) for bb, ff in zip(b, Fb) if ff <= tol]
    candidates += [(betas[k], 0.0) for k in roots]
    if not candidates:
        k = int(np.nanargmin(np.where(np.isfinite(F), np.abs(F), np.nan))) \
            if np.any(np.isfinite(F)) else 0
        raise ConnectError(
            "no connecting geodesic found",
            best={"beta": float(betas[k]), "mismatch": float(F[k]), "length": float(L[k])},
        )
    cand_b = np.array([c[0] for c in candidates])
    _, lengths = _mismatch(profile, s0, s1, theta1, cand_b, n_steps)
    order = np.lexsort((np.arange(cand_b.size), lengths))
    beta = float(cand_b[order[0]])
    length = float(lengths[order[0]])

    n = n_steps
    mismatch = float(min(c[1] for c in candidates if c[0] == beta))
    while n < max_steps:
        n *= 2
        beta_new, F_new, it = _secant_polish(profile, s0, s1, theta1, beta, n, tol, max_iter)
        iterations += it
        _, L_new = _mismatch(profile, s0, s1, theta1, np.array([beta_new]), n)
        # fourth order: the error of the finer run is about |dL| / 15
        converged = abs(L_new[0] - length) <= 15 * tol
        beta, length, mismatch = float(beta_new), float(L_new[0]), abs(float(F_new))
        if converged:
            break
    return beta, length, n, iterations, mismatch


@dataclass(frozen=True)
class Connection:
    path: GeodesicPath
    distance: float
    iterations: int
    n_steps: int
    mismatch: float

    def __iter__(self):
        return iter((self.path, self.distance))


def _single_point_path(s, a, r, phi0, psi_hat, times, s_vals, s_t):
    n = times.size
    zeros = np.zeros(n)
    return GeodesicPath(times, s_vals, s_t, zeros, zeros.copy(), np.full(n, a), r, None,
                        phi0, psi_hat)


def connect(p0: PolarPoint, p1: PolarPoint, spec: CoefficientSpec, tol: float = 1e-9,
            n_starts: int = 32, max_iter: int = 200, profile: ArcProfile | None = None,
            n_samples: int = 65) -> Connection:
    """Minimal geodesic between two polar points.

    The problem reduces to the plane spanned by ``phi0`` and ``phi1``, where
    the metric is ``ds^2 + a(s) dtheta^2`` and the target is
    ``(s1, theta1)`` with ``theta1`` the sphere distance.  Unpacks as
    ``path, distance``.
    """
    if profile is None:
        profile = profile_for(spec)
    s0, s1 = float(profile.W(p0.r)), float(profile.W(p1.r))
    for s in (s0, s1):
        if not profile.contains(s):
            raise DomainError(f"endpoint s={s!r} outside the profile domain")
    theta1 = sphere_distance(p0.phi, p1.phi)
    phi0 = p0.phi

    if theta1 < 1e-12:
        psi_hat = orthonormal_direction(phi0)
        if abs(s1 - s0) < 1e-15:
            path = _single_point_path(s0, float(profile.a(s0)), np.array([p0.r]), phi0, psi_hat,
                                      np.zeros(1), np.array([s0]), np.zeros(1))
            return Connection(path, 0.0, 0, 0, 0.0)
        d = abs(s1 - s0)
        times = np.linspace(0.0, d, n_samples)
        s_vals = s0 + np.sign(s1 - s0) * times
        path = GeodesicPath(times, s_vals, np.full(n_samples, np.sign(s1 - s0)),
                            np.zeros(n_samples), np.zeros(n_samples),
                            np.asarray(profile.a(s_vals), dtype=float),
                            np.asarray(profile.W_inv(s_vals), dtype=float), None, phi0, psi_hat,
                            {"coords": "s", "kind": "radial"})
        return Connection(path, d, 0, 0, 0.0)

    if abs(theta1 - math.pi) < 1e-12:
        psi_hat = orthonormal_direction(phi0)
    else:
        v = p1.phi.field - phi0.field * math.cos(theta1)
        psi_hat = v / v.norm()

    beta, length, n, iterations, mismatch = solve_plane(
        profile, s0, s1, theta1, tol, n_starts, max_iter)
    _, _, _, _, traj = _theta_flow(profile, s0, np.array([beta]), theta1, n, record=True)
    s_vals = np.array([x[0][0] for x in traj])
    p_vals = np.array([x[1][0] for x in traj])
    times = np.array([x[2][0] for x in traj])
    theta = np.linspace(0.0, theta1, n + 1)
    stride = max(1, n // (n_samples - 1))
    keep = np.unique(np.r_[np.arange(0, n + 1, stride), n])
    s_vals, p_vals, times, theta = s_vals[keep], p_vals[keep], times[keep], theta[keep]
    a = np.asarray(profile.a(s_vals), dtype=float)
    A0 = math.sqrt(float(profile.a(s0))) * math.sin(beta)
    r = np.asarray(profile.W_inv(s_vals), dtype=float) if profile.rf is not None else None
    path = GeodesicPath(times, s_vals, p_vals, theta, A0 / a, a, r, None, phi0, psi_hat,
                        {"coords": "s", "beta": beta, "n_steps": n, "iterations": iterations})
    return Connection(path, length, iterations, n, mismatch)


def _length(profile, s_of, ds_of, dtheta_of, u0=0.0, u1=1.0):
    def speed(u):
        a = float(profile.a(s_of(u)))
        return math.sqrt(ds_of(u) ** 2 + a * dtheta_of(u) ** 2)

    return integrate.quad(speed, u0, u1, epsabs=1e-13, epsrel=1e-13, limit=200)[0]


def comparison_length(profile: ArcProfile, s0: float, s1: float, theta1: float) -> float:
    """Length of the radial segment at ``phi0`` followed by the sphere arc at ``s1``."""
    radial = _length(profile, lambda u: s0 + u * (s1 - s0), lambda u: s1 - s0,
                     lambda u: 0.0)
    arc = _length(profile, lambda u: s1, lambda u: 0.0, lambda u: theta1)
    return radial + arc


def levi_civita_residual(path: GeodesicPath, profile: ArcProfile) -> float:
    """Largest metric norm of the covariant acceleration over interior samples.

    Velocities come from the reduced state; accelerations are centered
    differences of the velocities in time.  The connection terms are

        radial:  s_tt - a'(s) theta_t^2 / 2
        sphere:  theta_tt + (a'(s) / a(s)) s_t theta_t
    """
    if len(path) < 16:
        raise ValueError("need at least 16 samples")
    t = path.times
    s_tt = np.gradient(path.s_t, t)
    th_tt = np.gradient(path.theta_t, t)
    a, da, _ = profile.derivs(path.s)
    rad = s_tt - 0.5 * da * path.theta_t ** 2
    sph = th_tt + (da / a) * path.s_t * path.theta_t
    norm = np.sqrt(rad ** 2 + a * sph ** 2)
    return float(np.max(norm[1:-1]))


def path_from_arrays(times, s, s_t, theta, theta_t, profile: ArcProfile) -> GeodesicPath:
    """Wrap an arbitrary sampled curve (not necessarily a geodesic)."""
    times, s, s_t, theta, theta_t = (np.asarray(x, dtype=float) for x in
                                     (times, s, s_t, theta, theta_t))
    return GeodesicPath(times, s, s_t, theta, theta_t, np.asarray(profile.a(s), dtype=float))
