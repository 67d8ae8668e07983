"""Completeness classification and the cone / round-sphere completions.

The metric is geodesically complete only if the arc-length coordinate covers
the whole real line, ``(W-, W+) = (-inf, inf)``.  When an end is finite the
metric may still admit a one-point completion (a smooth point, a cone tip,
or a sphere pole); :func:`completion_check` decides which.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from .coeffs import (
    DEFAULT_QUAD_TOL,
    CallableCoefficient,
    ClosedForm,
    CoefficientSpec,
    RadialOverride,
    fd_step,
    improper_integral,
    power_sum,
    radial_functions,
    w_limits,
)
from .errors import DomainError

_POLE_SLOPE_TOL = 1e-3
_POLE_A_TOL = 1e-4


def angle_defect(K: float) -> float:
    return 2 * math.pi * (1 - K)


def cone_spec(K: float) -> CoefficientSpec:
    """Coefficients whose warping function is ``a = K^2 sigma^2``.

    ``sigma = s - W-`` is arc length measured from the tip.  Choosing
    ``g2 = 4`` makes ``sigma = 2r``, hence ``C1(m) = K^2 sigma(sqrt m)^2 / (4m)
    = K^2`` and ``C2(m) = 1/m - C1(m)/m``.
    """
    K = float(K)
    if not K > 0:
        raise DomainError("cone parameter K must be positive")
    c1 = power_sum((K * K, 0))
    c2 = power_sum((1 - K * K, -1))
    info = {"angle_defect": angle_defect(K), "s_tip": -2.0}
    k = 1 / K
    if abs(k - round(k)) < 1e-9:
        info["orbifold_order"] = int(round(k))
    return CoefficientSpec(
        "cone", c1, c2, kind="preset", params={"K": K},
        closed_form=ClosedForm(
            lambda r: 2 * (np.asarray(r) - 1), lambda s: 1 + np.asarray(s) / 2, -2.0, math.inf
        ),
        info=info,
    )


def sphere_completion_from_g2(g2, dg2=None, quad_tol: float = 1e-12, name="sphere_from_g2"):
    """Coefficients realizing ``a(s) = sin(s)^2`` for a chosen positive ``g2``.

    With ``W(r) = int_1^r sqrt(g2)``:

        g1(r) = sin(W(r))^2,   C1(m) = g1(sqrt m) / (4m),
        C2(m) = g2(sqrt m) / (4m) - g1(sqrt m) / (4m^2).

    The metric is considered on ``W^{-1}((0, pi))``, the component whose two
    ends are the poles of the round sphere.
    """
    if dg2 is None:
        def dg2(r):
            h = fd_step(r)
            return (g2(r + h) - g2(r - h)) / (2 * h)

    def W_scalar(r):
        r = float(r)
        if r == 1.0:
            return 0.0
        return integrate.quad(lambda x: math.sqrt(g2(x)), 1.0, r,
                              epsabs=quad_tol, epsrel=1e-13, limit=200)[0]

    W = np.vectorize(W_scalar, otypes=[float])

    def g1(r):
        return np.sin(W(r)) ** 2

    def dg1(r):
        return np.sin(2 * W(r)) * np.sqrt(np.vectorize(g2, otypes=[float])(r))

    def ddg1(r):
        w = W(r)
        g = np.vectorize(g2, otypes=[float])(r)
        dg = np.vectorize(dg2, otypes=[float])(r)
        return 2 * np.cos(2 * w) * g + np.sin(2 * w) * dg / (2 * np.sqrt(g))

    g2v = np.vectorize(g2, otypes=[float])
    dg2v = np.vectorize(dg2, otypes=[float])

    def C1(m):
        return float(g1(math.sqrt(m))) / (4 * m)

    def C2(m):
        r = math.sqrt(m)
        return g2(r) / (4 * m) - float(g1(r)) / (4 * m * m)

    r_hi = 2.0
    while W_scalar(r_hi) < math.pi:
        r_hi *= 2
    r_hi = optimize.brentq(lambda r: W_scalar(r) - math.pi, 1.0, r_hi, xtol=1e-15)

    return CoefficientSpec(
        name, CallableCoefficient(C1, "C1"), CallableCoefficient(C2, "C2"), kind="callable",
        r_domain=(1.0, r_hi),
        degenerate=lambda m: np.abs(np.sin(W(np.sqrt(m)))) < 1e-12,
        radial=RadialOverride(g1, dg1, ddg1, g2v, dg2v),
        flag="C1 vanishes at the poles W(r) = 0 and W(r) = pi",
    )


# ---------------------------------------------------------------------------
# completion checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EndCheck:
    """Completion analysis of one end of the arc-length interval."""

    end: str  # "zero" or "infinity"
    applicable: bool  # the end is at finite distance
    exists: bool
    kind: str  # "none", "smooth_point", "pole", "cone_tip", "unknown"
    failed: tuple[str, ...] = ()
    closing_slope_sq: float | None = None


@dataclass(frozen=True)
class CompletionReport:
    zero: EndCheck
    infinity: EndCheck

    @property
    def hint(self) -> str:
        z, i = self.zero.exists, self.infinity.exists
        if z and i:
            return "both"
        if z:
            return "one_point_at_zero"
        if i:
            return "one_point_at_infinity"
        return "none"


def _closing_slope_sq(rf, r):
    """``a'^2 / (4a)`` evaluated at radius ``r``; tends to 1 at a smooth point."""
    g1 = float(rf.g1(r))
    dg1 = float(rf.dg1(r))
    g2 = float(rf.g2(r))
    return dg1 * dg1 / (4 * g1 * g2), g1


def _pole_check(rf, r_end, inward, end):
    slopes = []
    for delta in (1e-5, 1e-6):
        r = r_end * (1 + inward * delta)
        slopes.append(_closing_slope_sq(rf, r))
    slope, a_val = slopes[-1]
    failed = []
    if a_val > _POLE_A_TOL:
        failed.append("a(s) -> 0 at the end")
    if abs(slope - 1) > _POLE_SLOPE_TOL:
        failed.append("a'(s)^2 / (4 a(s)) -> 1 at the end")
    kind = "pole" if not failed else ("cone_tip" if a_val <= _POLE_A_TOL else "none")
    return EndCheck(end, True, not failed, kind, tuple(failed), slope)


def completion_check(spec: CoefficientSpec, quad_tol: float = DEFAULT_QUAD_TOL,
                     limits=None) -> CompletionReport:
    """Decide whether each finite end admits a smooth one-point completion.

    At ``r = 0`` this needs a finite ``W-``, coefficients that extend
    smoothly to ``m = 0`` and ``C1(0) > 0``; at ``r = inf`` a finite ``W+``
    and coefficients that extend smoothly in ``1/m``.  Extendability is a
    declared property of expression trees; black-box coefficients never
    qualify.  Ends of a restricted radial domain (inside ``(0, inf)``) are
    checked geometrically: ``a -> 0`` with ``a'^2/(4a) -> 1``, which is the
    closing condition of a pole.
    """
    rf = radial_functions(spec).unguarded()
    w_minus, w_plus = limits if limits is not None else w_limits(rf, quad_tol)
    lo, hi = spec.r_domain

    if lo > 0:
        zero = _pole_check(rf, lo, +1, "zero")
    elif not math.isfinite(w_minus):
        zero = EndCheck("zero", False, False, "none")
    else:
        failed = []
        if not (spec.c1.extends_at_zero and spec.c2.extends_at_zero):
            failed.append("C1, C2 extend smoothly to [0, inf)")
        c1_zero = float(spec.c1.derivatives(0.0)[0]) if spec.c1.extends_at_zero else math.nan
        if not c1_zero > 0:
            failed.append("C1(0) > 0")
        slope, _ = _closing_slope_sq(rf, 1e-6)
        if failed:
            kind = "cone_tip" if abs(slope - 1) > _POLE_SLOPE_TOL and slope > 0 else "unknown"
        else:
            kind = "smooth_point"
        zero = EndCheck("zero", True, not failed, kind, tuple(failed), slope)

    if math.isfinite(hi):
        infinity = _pole_check(rf, hi, -1, "infinity")
    elif not math.isfinite(w_plus):
        infinity = EndCheck("infinity", False, False, "none")
    else:
        failed = []
        if not (spec.c1.extends_at_infinity and spec.c2.extends_at_infinity):
            failed.append("C1, C2 extend smoothly to (0, inf] in 1/m")
        slope, _ = _closing_slope_sq(rf, 1e6)
        kind = "smooth_point" if not failed else "unknown"
        infinity = EndCheck("infinity", True, not failed, kind, tuple(failed), slope)
    return CompletionReport(zero, infinity)


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CompletenessReport:
    name: str
    w_minus: float
    w_plus: float
    completion: CompletionReport
    criterion_agrees: bool | None = None
    closed_form_agrees: bool | None = None
    diagnostics: tuple[str, ...] = field(default_factory=tuple)

    @property
    def complete(self) -> bool:
        return self.w_minus == -math.inf and self.w_plus == math.inf

    @property
    def incomplete_toward_zero(self) -> bool:
        return math.isfinite(self.w_minus)

    @property
    def incomplete_toward_infinity(self) -> bool:
        return math.isfinite(self.w_plus)

    @property
    def completion_hint(self) -> str:
        return self.completion.hint

    def verdict(self) -> str:
        if self.complete:
            return "complete"
        parts = []
        if self.incomplete_toward_zero:
            parts.append("incomplete toward 0")
        if self.incomplete_toward_infinity:
            parts.append("incomplete toward infinity")
        return ", ".join(parts)


def _criterion(spec: CoefficientSpec, quad_tol: float):
    """Divergence of ``int sqrt(C1(m)/m)`` or ``int sqrt(C2(m))`` at each end.

    Valid only when both coefficients are nonnegative; returns ``None``
    otherwise.
    """
    if spec.r_domain != (0.0, math.inf):
        return None
    probe = 2.0 ** np.arange(-60, 61)
    c1 = spec.c1.derivatives(probe)[0]
    c2 = spec.c2.derivatives(probe)[0]
    if np.any(c1 < 0) or np.any(c2 < 0):
        return None

    def f1(m):
        return math.sqrt(max(float(spec.c1.derivatives(m)[0]), 0.0) / m)

    def f2(m):
        return math.sqrt(max(float(spec.c2.derivatives(m)[0]), 0.0))

    out = {}
    for end in ("zero", "inf"):
        i1 = improper_integral(f1, end, quad_tol)
        i2 = improper_integral(f2, end, quad_tol)
        out[end] = not (i1.finite and i2.finite)
    return out


def classify(spec: CoefficientSpec, quad_tol: float = DEFAULT_QUAD_TOL) -> CompletenessReport:
    """Compute ``W+-`` numerically and classify completeness.

    The verdict is cross-checked against the coefficient criterion and,
    for presets, against the closed-form limits; disagreements are listed
    in ``diagnostics``.
    """
    rf = radial_functions(spec)
    w_minus, w_plus = w_limits(rf, quad_tol)
    diagnostics = []

    crit = _criterion(spec, quad_tol)
    criterion_agrees = None
    if crit is not None:
        criterion_agrees = (crit["zero"] == (w_minus == -math.inf)) and (
            crit["inf"] == (w_plus == math.inf)
        )
        if not criterion_agrees:
            diagnostics.append("W+- quadrature disagrees with the C1/C2 integral criterion")

    closed_agrees = None
    cf = spec.closed_form
    if cf is not None:
        closed_agrees = True
        for num, exact in ((w_minus, cf.w_minus), (w_plus, cf.w_plus)):
            if math.isfinite(exact) != math.isfinite(num):
                closed_agrees = False
            elif math.isfinite(exact) and abs(exact - num) > max(1e-8, 100 * quad_tol):
                closed_agrees = False
        if not closed_agrees:
            diagnostics.append("W+- quadrature disagrees with the closed form")

    completion = completion_check(spec, quad_tol, limits=(w_minus, w_plus))
    return CompletenessReport(
        spec.name, w_minus, w_plus, completion, criterion_agrees, closed_agrees,
        tuple(diagnostics),
    )


def format_report(report: CompletenessReport, spec: CoefficientSpec | None = None) -> str:
    """Structured plain-text summary (``key: value`` lines in sections)."""
    def fmt(x):
        return "inf" if x == math.inf else "-inf" if x == -math.inf else repr(float(x))

    lines = [
        "[completeness]",
        f"coefficients: {report.name}",
        f"w_minus: {fmt(report.w_minus)}",
        f"w_plus: {fmt(report.w_plus)}",
        f"complete: {str(report.complete).lower()}",
        f"incomplete_toward_zero: {str(report.incomplete_toward_zero).lower()}",
        f"incomplete_toward_infinity: {str(report.incomplete_toward_infinity).lower()}",
        f"verdict: {report.verdict()}",
        f"criterion_agrees: {report.criterion_agrees}",
        f"closed_form_agrees: {report.closed_form_agrees}",
        "",
        "[completion]",
        f"completion_hint: {report.completion_hint}",
    ]
    for end in (report.completion.zero, report.completion.infinity):
        lines.append(
            f"{end.end}: applicable={str(end.applicable).lower()} "
            f"exists={str(end.exists).lower()} kind={end.kind}"
        )
        if end.closing_slope_sq is not None:
            lines.append(f"{end.end}_closing_slope_sq: {end.closing_slope_sq!r}")
        for cond in end.failed:
            lines.append(f"{end.end}_failed: {cond}")
    if spec is not None and spec.info:
        if "angle_defect" in spec.info:
            lines.append(f"angle_defect: {spec.info['angle_defect']!r}")
        if "orbifold_order" in spec.info:
            lines.append(
                f"note: orbifold tip with symmetry group Z/{spec.info['orbifold_order']}Z"
            )
    if spec is not None and spec.flag:
        lines.append(f"flag: {spec.flag}")
    for d in report.diagnostics:
        lines.append(f"diagnostic: {d}")
    return "\n".join(lines) + "\n"
