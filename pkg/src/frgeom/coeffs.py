"""Metric coefficients ``(C1, C2)`` and the scalar functions derived from them.

The invariant metric on densities of total mass ``m`` is fixed by two scalar
functions ``C1(m)`` and ``C2(m)``.  In half-density polar coordinates it
becomes ``g1(r) <dphi, dphi> + g2(r) dr^2`` with

    g1(r) = 4 C1(r^2) r^2,        g2(r) = 4 (C2(r^2) r^2 + C1(r^2)),

and in arc-length coordinates ``s = W(r) = int_1^r sqrt(g2)`` it becomes the
warped product ``ds^2 + a(s) <dphi, dphi>`` with ``a(s) = g1(W^{-1}(s))``.

Coefficients are either expression trees (sums of ``c m^p sin^2(w m + b)``
terms, differentiated analytically) or black-box callables differentiated by
central differences.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy import integrate, optimize

from .errors import DegenerateMetricError, DomainError, QuadratureError, UnknownPresetError

R_GUARD = (1e-8, 1e8)
DEFAULT_QUAD_TOL = 1e-10
MAX_SUBDIVISIONS = 60
# pieces of a convergent tail must shrink at least this fast
_MAX_RATIO = 0.95
DEGENERACY_TOL = 1e-12


def fd_step(x):
    """Central-difference step ``max(1e-5, 1e-5 |x|)``."""
    return np.maximum(1e-5, 1e-5 * np.abs(x))


# ---------------------------------------------------------------------------
# expression trees
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Term:
    """``coef * m**power``, optionally times ``sin(sin_freq*m + sin_shift)**2``."""

    coef: float
    power: float = 0.0
    sin_freq: float | None = None
    sin_shift: float = 0.0

    def _sin_parts(self, m):
        if self.sin_freq is None:
            return 1.0, 0.0, 0.0
        w = self.sin_freq
        arg = w * m + self.sin_shift
        return np.sin(arg) ** 2, w * np.sin(2 * arg), 2 * w * w * np.cos(2 * arg)

    def derivatives(self, m):
        """Value, first and second derivative in ``m``."""
        m = np.asarray(m, dtype=float)
        p, c = self.power, self.coef
        S, dS, ddS = self._sin_parts(m)
        P = m ** p
        dP = p * m ** (p - 1) if p != 0 else 0.0
        ddP = p * (p - 1) * m ** (p - 2) if p not in (0, 1) else 0.0
        return c * P * S, c * (dP * S + P * dS), c * (ddP * S + 2 * dP * dS + P * ddS)

    @property
    def _integer_power(self) -> bool:
        return float(self.power).is_integer()

    def to_dict(self) -> dict:
        d = {"coef": self.coef, "power": self.power}
        if self.sin_freq is not None:
            d["sin_freq"] = self.sin_freq
            d["sin_shift"] = self.sin_shift
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "Term":
        return cls(
            float(d["coef"]),
            float(d.get("power", 0.0)),
            None if d.get("sin_freq") is None else float(d["sin_freq"]),
            float(d.get("sin_shift", 0.0)),
        )


@dataclass(frozen=True)
class Expression:
    """Sum of :class:`Term` objects; a smooth function of the total mass."""

    terms: tuple[Term, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(t for t in self.terms if t.coef != 0.0))

    analytic = True

    def derivatives(self, m):
        m = np.asarray(m, dtype=float)
        v = d1 = d2 = np.zeros_like(m)
        for t in self.terms:
            a, b, c = t.derivatives(m)
            v, d1, d2 = v + a, d1 + b, d2 + c
        return v, d1, d2

    def __call__(self, m):
        return self.derivatives(m)[0]

    @property
    def extends_at_zero(self) -> bool:
        """Smooth extension to ``m = 0``: only nonnegative integer powers."""
        return all(t._integer_power and t.power >= 0 for t in self.terms)

    @property
    def extends_at_infinity(self) -> bool:
        """Smooth extension to ``m = inf`` in the coordinate ``1/m``."""
        return all(
            t.sin_freq is None and t._integer_power and t.power <= 0 for t in self.terms
        )

    def to_list(self) -> list:
        return [t.to_dict() for t in self.terms]

    @classmethod
    def from_list(cls, items: Sequence[Mapping]) -> "Expression":
        return cls(tuple(Term.from_dict(d) for d in items))


def power_sum(*pairs) -> Expression:
    """``power_sum((c0, p0), (c1, p1), ...)`` is ``sum c_i m**p_i``."""
    return Expression(tuple(Term(float(c), float(p)) for c, p in pairs))


class CallableCoefficient:
    """Black-box coefficient with central-difference derivatives.

    The step is ``h = max(1e-5, 1e-5 |m|)``, clamped to ``m/2`` so the
    stencil stays on the positive half line.
    """

    analytic = False
    extends_at_zero = False
    extends_at_infinity = False

    def __init__(self, fn: Callable[[float], float], name: str = "callable"):
        self.fn = fn
        self.name = name

    def _eval(self, m):
        return np.vectorize(self.fn, otypes=[float])(m)

    def derivatives(self, m):
        m = np.asarray(m, dtype=float)
        h = np.minimum(fd_step(m), m / 2)
        f0, fp, fm = self._eval(m), self._eval(m + h), self._eval(m - h)
        return f0, (fp - fm) / (2 * h), (fp - 2 * f0 + fm) / (h * h)

    def __call__(self, m):
        return self._eval(np.asarray(m, dtype=float))


# ---------------------------------------------------------------------------
# coefficient spec
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClosedForm:
    """Analytic arc-length map of a preset."""

    W: Callable
    W_inv: Callable
    w_minus: float
    w_plus: float


@dataclass(frozen=True)
class RadialOverride:
    """Directly specified ``g1, g2`` with derivatives (for constructed specs)."""

    g1: Callable
    dg1: Callable
    ddg1: Callable
    g2: Callable
    dg2: Callable


@dataclass(frozen=True, eq=False)
class CoefficientSpec:
    """The pair ``(C1, C2)`` together with everything needed to evaluate it.

    ``r_domain`` restricts the radial interval on which the metric is
    considered; it is ``(0, inf)`` except for constructions whose ``g1``
    vanishes inside ``(0, inf)`` (the round-sphere completion).
    """

    name: str
    c1: object
    c2: object
    kind: str = "expression"
    params: Mapping = field(default_factory=dict)
    closed_form: ClosedForm | None = None
    r_domain: tuple[float, float] = (0.0, math.inf)
    degenerate: Callable | None = None
    radial: RadialOverride | None = None
    flag: str | None = None
    # derived, not serialized
    info: Mapping = field(default_factory=dict)

    @property
    def analytic(self) -> bool:
        return self.radial is not None or (self.c1.analytic and self.c2.analytic)

    def check_nondegenerate(self, m):
        if self.degenerate is None:
            return
        bad = np.asarray(self.degenerate(np.asarray(m, dtype=float)))
        if np.any(bad):
            raise DegenerateMetricError(f"{self.name}: C1 vanishes at total mass {m!r}")

    def C1(self, m):
        self.check_nondegenerate(m)
        return self.c1.derivatives(m)[0]

    def C2(self, m):
        self.check_nondegenerate(m)
        return self.c2.derivatives(m)[0]

    def to_dict(self) -> dict:
        if self.kind == "preset":
            return {"preset": self.name, **dict(self.params)}
        if self.kind == "expression":
            return {"expression": {"c1": self.c1.to_list(), "c2": self.c2.to_list()}}
        raise DomainError(f"coefficient spec {self.name!r} is not serializable")


def expression_spec(c1: Expression, c2: Expression, name: str = "expression") -> CoefficientSpec:
    return CoefficientSpec(name, c1, c2, kind="expression")


def callable_spec(c1: Callable, c2: Callable, name: str = "callable") -> CoefficientSpec:
    return CoefficientSpec(
        name, CallableCoefficient(c1, "C1"), CallableCoefficient(c2, "C2"), kind="callable"
    )


def spec_from_dict(d: Mapping) -> CoefficientSpec:
    """Inverse of :meth:`CoefficientSpec.to_dict`."""
    if "preset" in d:
        params = {k: v for k, v in d.items() if k != "preset"}
        return make_preset(d["preset"], **params)
    if "expression" in d:
        e = d["expression"]
        return expression_spec(Expression.from_list(e["c1"]), Expression.from_list(e["c2"]))
    raise DomainError(f"cannot build a coefficient spec from {dict(d)!r}")


def _monotone_inverse(W: Callable, s: float, lo: float, hi: float) -> float:
    """Solve ``W(r) = s`` for increasing ``W`` on ``(lo, hi)``, bracketing from r=1."""
    if s == 0.0:
        return 1.0
    a, b = 1.0, 1.0
    if s > 0:
        b = min(2.0, hi)
        while W(b) < s:
            if b >= hi:
                raise DomainError(f"s={s!r} beyond the numeric radial domain")
            a, b = b, min(2 * b, hi)
    else:
        a = max(0.5, lo)
        while W(a) > s:
            if a <= lo:
                raise DomainError(f"s={s!r} beyond the numeric radial domain")
            a, b = max(a / 2, lo), a
    return optimize.brentq(lambda r: W(r) - s, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def _extended_W(r):
    r = np.asarray(r, dtype=float)
    # grouped so that W(1) is exactly 0
    return (r * np.sqrt(1 + r * r) - np.sqrt(2.0)) + (np.arcsinh(r) - np.arcsinh(1.0))


_EXTENDED_W_MINUS = -(math.sqrt(2) + math.asinh(1))


def _extended_W_inv(s):
    """Vectorized Newton iteration on the convex, increasing ``W``.

    Both ``(s - W-)/2`` and ``sqrt(s - W-)`` lie right of the root (since
    ``W(r) - W- >= max(2r, r^2)``), so Newton decreases monotonically to it.
    """
    s = np.asarray(s, dtype=float)
    d = np.maximum(s - _EXTENDED_W_MINUS, 0.0)
    r = np.minimum(d / 2, np.sqrt(d))
    for _ in range(100):
        step = (_extended_W(r) - s) / (2 * np.sqrt(1 + r * r))
        r_new = np.maximum(r - step, 0.0)
        done = np.all(np.abs(r_new - r) <= 4e-16 * np.maximum(r_new, 1e-300))
        r = r_new
        if done:
            break
    return r


def _sphere_degenerate(m):
    return np.abs(np.sin(m - 1.0)) < DEGENERACY_TOL


def _preset_reciprocal():
    return CoefficientSpec(
        "reciprocal", power_sum((1, -1)), power_sum(), kind="preset",
        closed_form=ClosedForm(
            lambda r: 2 * np.log(r), lambda s: np.exp(np.asarray(s) / 2), -math.inf, math.inf
        ),
    )


def _preset_fisher_rao():
    return CoefficientSpec(
        "fisher_rao", power_sum((1, 0)), power_sum(), kind="preset",
        closed_form=ClosedForm(
            lambda r: 2 * (np.asarray(r) - 1), lambda s: 1 + np.asarray(s) / 2, -2.0, math.inf
        ),
    )


def _preset_extended():
    return CoefficientSpec(
        "extended", power_sum((1, 0)), power_sum((1, 0)), kind="preset",
        closed_form=ClosedForm(
            _extended_W, _extended_W_inv, _EXTENDED_W_MINUS, math.inf
        ),
    )


def _preset_reciprocal_sq():
    return CoefficientSpec(
        "reciprocal_sq", power_sum((1, -2)), power_sum(), kind="preset",
        closed_form=ClosedForm(
            lambda r: 2 - 2 / np.asarray(r), lambda s: 2 / (2 - np.asarray(s)), -math.inf, 2.0
        ),
    )


def _preset_sphere_completion():
    c1 = Expression((Term(0.25, -1, 1.0, -1.0),))
    c2 = Expression((Term(1.0, 0), Term(-0.25, -2, 1.0, -1.0)))
    return CoefficientSpec(
        "sphere_completion", c1, c2, kind="preset",
        closed_form=ClosedForm(
            lambda r: np.asarray(r) ** 2 - 1, lambda s: np.sqrt(1 + np.asarray(s)), 0.0, math.pi
        ),
        r_domain=(1.0, math.sqrt(1 + math.pi)),
        degenerate=_sphere_degenerate,
        flag="C1 vanishes where sin(m-1) = 0 (m = 1 is the seam r = 1)",
    )


def _preset_cone(K: float):
    from .completeness import cone_spec

    return cone_spec(K)


PRESETS = {
    "reciprocal": _preset_reciprocal,
    "fisher_rao": _preset_fisher_rao,
    "extended": _preset_extended,
    "reciprocal_sq": _preset_reciprocal_sq,
    "sphere_completion": _preset_sphere_completion,
    "cone": _preset_cone,
}


def make_preset(name: str, **params) -> CoefficientSpec:
    """Return one of the named coefficient pairs.

    ``cone`` takes the opening parameter ``K``; the others take no
    parameters.
    """
    try:
        builder = PRESETS[name]
    except KeyError:
        raise UnknownPresetError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return builder(**params)


# ---------------------------------------------------------------------------
# positivity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PositivityReport:
    m: np.ndarray
    c1_positive: np.ndarray
    positive_definite: np.ndarray
    degenerate: np.ndarray

    @property
    def ok(self) -> bool:
        return bool(np.all(self.positive_definite))


def validate_positive_definite(spec: CoefficientSpec, m_samples) -> PositivityReport:
    """Check ``C1(m) > 0`` and ``C2(m) > -C1(m)/m`` on every sample."""
    m = np.atleast_1d(np.asarray(m_samples, dtype=float))
    if np.any(m <= 0):
        raise DomainError("total masses must be positive")
    degen = (
        np.asarray(spec.degenerate(m), dtype=bool)
        if spec.degenerate is not None
        else np.zeros(m.shape, dtype=bool)
    )
    c1 = spec.c1.derivatives(m)[0]
    c2 = spec.c2.derivatives(m)[0]
    c1_pos = (c1 > 0) & ~degen
    pd = c1_pos & (c2 > -c1 / m)
    return PositivityReport(m, c1_pos, pd, degen)


# ---------------------------------------------------------------------------
# radial functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RadialFunctions:
    """``g1, g2`` and derivatives as functions of the polar radius ``r``."""

    derivation: CoefficientSpec
    r_bounds: tuple[float, float] = R_GUARD

    def _guard(self, r):
        r = np.asarray(r, dtype=float)
        lo, hi = self.r_bounds
        if np.any(~(r >= lo)) or np.any(~(r <= hi)):
            raise DomainError(f"radius outside [{lo:g}, {hi:g}]")
        return r

    def unguarded(self) -> "RadialFunctions":
        return replace(self, r_bounds=(0.0, math.inf))

    def _c(self, r):
        m = r * r
        return m, self.derivation.c1.derivatives(m), self.derivation.c2.derivatives(m)

    def g1(self, r):
        r = self._guard(r)
        spec = self.derivation
        if spec.radial is not None:
            return spec.radial.g1(r)
        spec.check_nondegenerate(r * r)
        m, (c1, _, _), _ = self._c(r)
        return 4 * c1 * m

    def g2(self, r):
        r = self._guard(r)
        if self.derivation.radial is not None:
            return self.derivation.radial.g2(r)
        m, (c1, _, _), (c2, _, _) = self._c(r)
        return 4 * (c2 * m + c1)

    def dg1(self, r):
        r = self._guard(r)
        if self.derivation.radial is not None:
            return self.derivation.radial.dg1(r)
        m, (c1, dc1, _), _ = self._c(r)
        return 8 * r * (c1 + m * dc1)

    def ddg1(self, r):
        r = self._guard(r)
        if self.derivation.radial is not None:
            return self.derivation.radial.ddg1(r)
        m, (c1, dc1, ddc1), _ = self._c(r)
        return 8 * c1 + 40 * m * dc1 + 16 * m * m * ddc1

    def dg2(self, r):
        r = self._guard(r)
        if self.derivation.radial is not None:
            return self.derivation.radial.dg2(r)
        m, (_, dc1, _), (c2, dc2, _) = self._c(r)
        return 8 * r * (m * dc2 + c2 + dc1)

    def values(self, r):
        """``(g1, g1', g2, g2')`` in one pass; used by the geodesic integrator."""
        spec = self.derivation
        if spec.radial is not None:
            return self.g1(r), self.dg1(r), self.g2(r), self.dg2(r)
        r = self._guard(r)
        spec.check_nondegenerate(r * r)
        m, (c1, dc1, _), (c2, dc2, _) = self._c(r)
        return 4 * c1 * m, 8 * r * (c1 + m * dc1), 4 * (c2 * m + c1), 8 * r * (m * dc2 + c2 + dc1)


def radial_functions(spec: CoefficientSpec) -> RadialFunctions:
    return RadialFunctions(spec)


# ---------------------------------------------------------------------------
# improper integrals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ImproperIntegral:
    value: float
    finite: bool
    n_pieces: int


def _quad(f, a, b, tol):
    val, err, *rest = integrate.quad(
        f, a, b, epsabs=tol / 10, epsrel=1e-13, limit=200, full_output=1
    )
    if len(rest) > 1 and err > tol:
        raise QuadratureError(f"quadrature on [{a!r}, {b!r}] did not converge", partial=val)
    return val


def improper_integral(
    f: Callable[[float], float],
    toward: str,
    quad_tol: float = DEFAULT_QUAD_TOL,
    max_pieces: int = MAX_SUBDIVISIONS,
) -> ImproperIntegral:
    """``int_1^inf f`` (``toward="inf"``) or ``int_0^1 f`` (``toward="zero"``).

    ``f`` must be nonnegative.  The range is cut into dyadic pieces
    ``[2^(k-1), 2^k]`` (or ``[2^-k, 2^(1-k)]``).  After each piece the tail
    is estimated from the ratio of the last two pieces; the integral is
    declared finite once these extrapolated partial sums satisfy the Cauchy
    criterion at ``quad_tol`` twice in a row, and infinite if that has not
    happened after ``max_pieces`` pieces.
    """
    if toward not in ("inf", "zero"):
        raise ValueError("toward must be 'inf' or 'zero'")
    pieces = []
    prev_est = None
    stable = 0
    for k in range(1, max_pieces + 1):
        if toward == "inf":
            a, b = 2.0 ** (k - 1), 2.0 ** k
        else:
            a, b = 2.0 ** (-k), 2.0 ** (1 - k)
        try:
            piece = _quad(f, a, b, quad_tol)
        except (FloatingPointError, OverflowError, ZeroDivisionError):
            return ImproperIntegral(math.inf, False, k)
        if not math.isfinite(piece):
            return ImproperIntegral(math.inf, False, k)
        pieces.append(piece)
        total = math.fsum(pieces)
        est = None
        if k >= 2:
            last, before = pieces[-1], pieces[-2]
            if last == 0.0:
                est = total
            elif before > 0.0 and 0.0 <= last / before <= _MAX_RATIO:
                q = last / before
                est = total + last * q / (1 - q)
        if est is not None and prev_est is not None and abs(est - prev_est) <= quad_tol:
            stable += 1
            if stable >= 2:
                return ImproperIntegral(est, True, k)
        else:
            stable = 0
        prev_est = est
    return ImproperIntegral(math.inf, False, max_pieces)


# ---------------------------------------------------------------------------
# arc-length profile
# ---------------------------------------------------------------------------

class ArcProfile:
    """Warping function ``a(s)`` of ``ds^2 + a(s) <dphi, dphi>``.

    Build with :func:`arc_profile` from radial functions, or with
    :meth:`ArcProfile.direct` from an explicit ``a(s)``.  ``s_bounds`` is
    the open interval on which ``a`` can actually be evaluated (the limits
    ``w_minus, w_plus`` intersected with the radial guard).
    """

    def __init__(
        self,
        *,
        W=None,
        W_inv=None,
        w_minus,
        w_plus,
        s_bounds,
        rf: RadialFunctions | None = None,
        a_funcs=None,
        quad_tol=DEFAULT_QUAD_TOL,
        analytic=True,
        name="profile",
    ):
        self._W = W
        self._W_inv = W_inv
        self.w_minus = float(w_minus)
        self.w_plus = float(w_plus)
        self.s_bounds = (float(s_bounds[0]), float(s_bounds[1]))
        self.rf = rf
        self._a_funcs = a_funcs
        self.quad_tol = quad_tol
        self.analytic = analytic
        self.name = name

    @classmethod
    def direct(cls, a, da=None, dda=None, s_domain=(-math.inf, math.inf), name="direct"):
        """Profile given by ``a(s)`` alone (no density-space realization)."""
        return cls(
            w_minus=s_domain[0], w_plus=s_domain[1], s_bounds=s_domain,
            a_funcs=(a, da, dda), analytic=da is not None and dda is not None, name=name,
        )

    @property
    def spec(self) -> CoefficientSpec | None:
        return None if self.rf is None else self.rf.derivation

    def contains(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        lo, hi = self.s_bounds
        return (s > lo) & (s < hi)

    def _check(self, s):
        s = np.asarray(s, dtype=float)
        if not np.all(self.contains(s)):
            raise DomainError(f"s outside the profile domain {self.s_bounds}")
        return s

    def W(self, r):
        if self._W is None:
            raise DomainError(f"{self.name} has no radial coordinate")
        return self._W(r)

    def W_inv(self, s):
        if self._W_inv is None:
            raise DomainError(f"{self.name} has no radial coordinate")
        return self._W_inv(self._check(s))

    def _a_only(self, s):
        if self._a_funcs is not None:
            return np.asarray(self._a_funcs[0](s), dtype=float)
        return self.rf.g1(self._W_inv(s))

    def a(self, s):
        return self._a_only(self._check(s))

    def derivs(self, s):
        """``(a, a', a'')`` at ``s``."""
        s = self._check(s)
        if self._a_funcs is not None:
            a, da, dda = self._a_funcs
            if self.analytic:
                return (np.asarray(a(s), dtype=float), np.asarray(da(s), dtype=float),
                        np.asarray(dda(s), dtype=float))
            return self._fd_derivs(s)
        if not self.analytic:
            return self._fd_derivs(s)
        rf = self.rf
        r = self._W_inv(s)
        g2 = rf.g2(r)
        dg1 = rf.dg1(r)
        a = rf.g1(r)
        da = dg1 / np.sqrt(g2)
        dda = rf.ddg1(r) / g2 - dg1 * rf.dg2(r) / (2 * g2 * g2)
        return a, da, dda

    def a_da(self, s):
        """``(a, a')`` without the second derivative."""
        s = self._check(s)
        if self._a_funcs is not None or not self.analytic:
            a, da, _ = self.derivs(s)
            return a, da
        r = self._W_inv(s)
        g1, dg1, g2, _ = self.rf.values(r)
        return g1, dg1 / np.sqrt(g2)

    def _fd_derivs(self, s):
        h = fd_step(s)
        a0, ap, am = self._a_only(s), self._a_only(s + h), self._a_only(s - h)
        return a0, (ap - am) / (2 * h), (ap - 2 * a0 + am) / (h * h)

    def da(self, s):
        return self.derivs(s)[1]

    def dda(self, s):
        return self.derivs(s)[2]

    def a_masked(self, s):
        """``(a, a')`` with NaN outside the domain; for vectorized integrators."""
        s = np.asarray(s, dtype=float)
        ok = self.contains(s)
        if ok.all():
            a, da = self.a_da(s)
            return np.where(a > 0, a, np.nan), da
        a = np.full(s.shape, np.nan)
        da = np.full(s.shape, np.nan)
        if np.any(ok):
            a[ok], da[ok] = self.a_da(s[ok])
        a[~(a > 0)] = np.nan
        return a, da

    def __repr__(self):
        return f"ArcProfile({self.name}, W-={self.w_minus:g}, W+={self.w_plus:g})"


def numeric_W(rf: RadialFunctions, quad_tol: float = DEFAULT_QUAD_TOL) -> Callable:
    """``W(r) = int_1^r sqrt(g2)`` by adaptive quadrature on dyadic pieces."""
    g = rf.unguarded()

    def sqrt_g2(x):
        return math.sqrt(float(g.g2(x)))

    def W(r):
        r = float(r)
        if r == 1.0:
            return 0.0
        a, b = (1.0, r) if r > 1 else (r, 1.0)
        knots = [a]
        while knots[-1] * 2 < b:
            knots.append(knots[-1] * 2)
        knots.append(b)
        total = math.fsum(_quad(sqrt_g2, x0, x1, quad_tol) for x0, x1 in zip(knots, knots[1:]))
        return total if r > 1 else -total

    return np.vectorize(W, otypes=[float])


def w_limits(rf: RadialFunctions, quad_tol: float = DEFAULT_QUAD_TOL):
    """Numerical ``(W-, W+)`` by the dyadic divergence rule.

    Radial domains with finite interior ends (``r_domain``) give proper
    integrals instead.
    """
    g = rf.unguarded()
    lo, hi = rf.derivation.r_domain
    W = numeric_W(rf, quad_tol)

    def f(x):
        return math.sqrt(float(g.g2(x)))

    if lo > 0:
        w_minus = float(W(lo))
    else:
        res = improper_integral(f, "zero", quad_tol)
        w_minus = -res.value
    if math.isfinite(hi):
        w_plus = float(W(hi))
    else:
        res = improper_integral(f, "inf", quad_tol)
        w_plus = res.value
    return w_minus, w_plus


def arc_profile(
    rf: RadialFunctions, quad_tol: float = DEFAULT_QUAD_TOL, numeric: bool = False
) -> ArcProfile:
    """Arc-length profile of the radial functions.

    Presets carry closed forms for ``W`` and ``W^{-1}``; these are used
    unless ``numeric=True``, in which case ``W`` is computed by adaptive
    quadrature, ``W^{-1}`` by bracketed root finding and ``W+-`` by the
    divergence rule of :func:`improper_integral`.
    """
    spec = rf.derivation
    lo_r = max(spec.r_domain[0], rf.r_bounds[0])
    hi_r = min(spec.r_domain[1], rf.r_bounds[1])
    cf = spec.closed_form
    if cf is not None and not numeric:
        W, W_inv = cf.W, cf.W_inv
        w_minus, w_plus = cf.w_minus, cf.w_plus
    else:
        W = numeric_W(rf, quad_tol)
        W_inv = np.vectorize(
            lambda s: _monotone_inverse(lambda r: float(W(r)), float(s), lo_r, hi_r),
            otypes=[float],
        )
        w_minus, w_plus = w_limits(rf, quad_tol)
    s_lo = max(w_minus, float(W(lo_r)))
    s_hi = min(w_plus, float(W(hi_r)))
    return ArcProfile(
        W=W, W_inv=W_inv, w_minus=w_minus, w_plus=w_plus, s_bounds=(s_lo, s_hi),
        rf=rf, quad_tol=quad_tol, analytic=spec.analytic, name=spec.name,
    )


def profile_for(spec: CoefficientSpec, quad_tol: float = DEFAULT_QUAD_TOL, numeric=False):
    """Shorthand for ``arc_profile(radial_functions(spec))``."""
    return arc_profile(radial_functions(spec), quad_tol, numeric)


def pseudosphere_profile() -> ArcProfile:
    """``a(s) = exp(-2s)``: constant curvature -1 in the (s, theta) plane."""
    return ArcProfile.direct(
        lambda s: np.exp(-2 * np.asarray(s)),
        lambda s: -2 * np.exp(-2 * np.asarray(s)),
        lambda s: 4 * np.exp(-2 * np.asarray(s)),
        name="pseudosphere",
    )


def round_sphere_profile() -> ArcProfile:
    """``a(s) = sin(s)^2`` on ``(0, pi)``."""
    return ArcProfile.direct(
        lambda s: np.sin(s) ** 2,
        lambda s: np.sin(2 * np.asarray(s)),
        lambda s: 2 * np.cos(2 * np.asarray(s)),
        s_domain=(0.0, math.pi),
        name="round_sphere",
    )


DIRECT_PROFILES = {"pseudosphere": pseudosphere_profile, "round_sphere": round_sphere_profile}
