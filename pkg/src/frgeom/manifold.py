"""Discretized compact manifold carrying the reference probability density.

A :class:`Grid` is a finite point set with positive quadrature weights
``w_i`` summing to one; the weights *are* the reference density ``mu0``.
Densities are stored as ratios against ``mu0`` so that no point coordinates
are ever needed.

All sums go through :func:`math.fsum`, which is correctly rounded and
therefore independent of the order of the grid points.  This makes every
integral exactly invariant under a simultaneous permutation of weights and
field values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, DomainError

WEIGHT_SUM_TOL = 1e-12
SPHERE_TOL = 1e-10


def _frozen(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


def fsum_product(*arrays: np.ndarray) -> float:
    """Correctly rounded ``sum_i prod_k arrays[k][i]``."""
    prod = arrays[0]
    for a in arrays[1:]:
        prod = prod * a
    return math.fsum(prod.tolist())


@dataclass(frozen=True, eq=False)
class Grid:
    """Weighted point set standing in for ``(M, mu0)``."""

    weights: np.ndarray
    labels: tuple = ()

    def __post_init__(self):
        w = _frozen(self.weights, "weights")
        if w.size < 2:
            raise DomainError("a grid needs at least 2 points")
        if np.any(w <= 0):
            raise DomainError("grid weights must be strictly positive")
        total = math.fsum(w.tolist())
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise DomainError(f"grid weights sum to {total!r}, expected 1")
        object.__setattr__(self, "weights", w)
        labels = tuple(self.labels) if self.labels else tuple(range(w.size))
        if len(labels) != w.size:
            raise DimensionError("one label per grid point required")
        object.__setattr__(self, "labels", labels)

    @property
    def n_points(self) -> int:
        return self.weights.size

    @classmethod
    def uniform(cls, n_points: int) -> "Grid":
        return cls(np.full(n_points, 1.0 / n_points))

    @classmethod
    def normalized(cls, weights: Sequence[float], labels=()) -> "Grid":
        """Build a grid from arbitrary positive weights, rescaled to mass one."""
        w = np.asarray(weights, dtype=float)
        w = w / math.fsum(w.tolist())
        return cls(w, labels)

    def permuted(self, perm: Sequence[int]) -> "Grid":
        perm = list(perm)
        return Grid(self.weights[perm], tuple(self.labels[i] for i in perm))

    def same_as(self, other: "Grid") -> bool:
        return self is other or (
            self.n_points == other.n_points
            and np.array_equal(self.weights, other.weights)
        )

    def unit_field(self, index: int) -> "ScalarField":
        """Indicator field of grid point ``index``."""
        values = np.zeros(self.n_points)
        values[index] = 1.0
        return ScalarField(values, self)

    def constant(self, value: float = 1.0) -> "ScalarField":
        return ScalarField(np.full(self.n_points, float(value)), self)

    def __repr__(self):
        return f"Grid(n_points={self.n_points})"


def _check_grid(values: np.ndarray, grid: Grid):
    if values.size != grid.n_points:
        raise DimensionError(
            f"field has {values.size} values, grid has {grid.n_points} points"
        )


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Real function ``f`` on the grid (an element of ``C(M, R)``)."""

    values: np.ndarray
    grid: Grid

    def __post_init__(self):
        v = _frozen(self.values, "values")
        _check_grid(v, self.grid)
        object.__setattr__(self, "values", v)

    def _like(self, values) -> "ScalarField":
        return ScalarField(values, self.grid)

    def __add__(self, other: "ScalarField") -> "ScalarField":
        same_grid(self, other)
        return self._like(self.values + other.values)

    def __sub__(self, other: "ScalarField") -> "ScalarField":
        same_grid(self, other)
        return self._like(self.values - other.values)

    def __mul__(self, c: float) -> "ScalarField":
        return self._like(self.values * float(c))

    __rmul__ = __mul__

    def __neg__(self) -> "ScalarField":
        return self._like(-self.values)

    def __truediv__(self, c: float) -> "ScalarField":
        return self._like(self.values / float(c))

    def norm(self) -> float:
        return math.sqrt(l2_inner(self, self))

    def permuted(self, perm, grid: Grid | None = None) -> "ScalarField":
        perm = list(perm)
        return ScalarField(self.values[perm], grid or self.grid.permuted(perm))


@dataclass(frozen=True, eq=False)
class DensityField:
    """Density ``alpha = ratio * mu0`` stored through its ratio."""

    ratio: np.ndarray
    grid: Grid

    def __post_init__(self):
        v = _frozen(self.ratio, "ratio")
        _check_grid(v, self.grid)
        object.__setattr__(self, "ratio", v)

    @property
    def is_positive(self) -> bool:
        return bool(np.all(self.ratio > 0))

    def __add__(self, other: "DensityField") -> "DensityField":
        same_grid(self, other)
        return DensityField(self.ratio + other.ratio, self.grid)

    def __mul__(self, c: float) -> "DensityField":
        return DensityField(self.ratio * float(c), self.grid)

    __rmul__ = __mul__

    def permuted(self, perm, grid: Grid | None = None) -> "DensityField":
        perm = list(perm)
        return DensityField(self.ratio[perm], grid or self.grid.permuted(perm))


@dataclass(frozen=True, eq=False)
class SpherePoint:
    """Point of the unit L2(mu0)-sphere."""

    field: ScalarField

    def __post_init__(self):
        n2 = l2_inner(self.field, self.field)
        if abs(n2 - 1.0) > SPHERE_TOL:
            raise DomainError(f"sphere point has squared norm {n2!r}, expected 1")

    @classmethod
    def normalize(cls, field: ScalarField) -> "SpherePoint":
        n = field.norm()
        if n < 1e-10:
            raise DomainError("cannot normalize a (near) zero field")
        return cls(field / n)

    @property
    def grid(self) -> Grid:
        return self.field.grid

    @property
    def values(self) -> np.ndarray:
        return self.field.values


def same_grid(a, b):
    ga, gb = a.grid, b.grid
    if not ga.same_as(gb):
        raise DimensionError("fields live on different grids")


def l2_inner(h: ScalarField, k: ScalarField) -> float:
    """``<h, k>_{L2(mu0)} = sum_i w_i h_i k_i``."""
    same_grid(h, k)
    # h * k first: elementwise multiplication commutes exactly, so the result is symmetric
    return fsum_product(h.grid.weights, h.values * k.values)


def integrate_density(alpha: DensityField) -> float:
    """Total mass ``int_M alpha = sum_i w_i a_i``."""
    return fsum_product(alpha.grid.weights, alpha.ratio)


def sphere_distance(phi0: SpherePoint, phi1: SpherePoint) -> float:
    """Great-circle distance on the unit sphere, in ``[0, pi]``.

    Uses the half-angle form ``2 atan2(|phi1 - phi0|, |phi1 + phi0|)``, equal
    to ``arccos <phi0, phi1>`` but without its loss of accuracy near 0 and pi
    (``arccos(1 - eps)`` is about ``sqrt(2 eps)``).  The result is clamped.
    """
    same_grid(phi0.field, phi1.field)
    d = (phi1.field - phi0.field).norm()
    s = (phi1.field + phi0.field).norm()
    return min(math.pi, max(0.0, 2.0 * math.atan2(d, s)))


def orthonormal_direction(phi0: SpherePoint) -> ScalarField:
    """Deterministic unit tangent at ``phi0``.

    Projects the first coordinate indicator onto the tangent space of the
    sphere at ``phi0`` and normalizes; falls back to the second indicator if
    the first is (numerically) parallel to ``phi0``.
    """
    grid = phi0.grid
    for idx in range(grid.n_points):
        e = grid.unit_field(idx)
        v = e - phi0.field * l2_inner(e, phi0.field)
        n = v.norm()
        if n > 1e-8:
            return v / n
    raise DomainError("no tangent direction found")  # pragma: no cover
