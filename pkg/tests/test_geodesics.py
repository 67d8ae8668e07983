import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frgeom.coeffs import make_preset, profile_for
from frgeom.errors import BoundaryHitError, ConnectError, DomainError
from frgeom.geodesics import (
    GeodesicInitial,
    closed_form,
    comparison_length,
    connect,
    levi_civita_residual,
    path_from_arrays,
    shoot,
    shoot_arc,
)
from frgeom.manifold import Grid, SpherePoint, l2_inner, orthonormal_direction, sphere_distance
from frgeom.transforms import PolarPoint

from conftest import FOUR_EXAMPLES, random_sphere_point, rotate

RECIPROCAL = make_preset("reciprocal")
FISHER_RAO = make_preset("fisher_rao")


def initial(p, r_t0, psi_norm=1.0):
    return GeodesicInitial.in_plane(p, r_t0, psi_norm)


class TestShoot:
    @pytest.mark.parametrize("c", [-0.4, 0.0, 0.3, 1.0])
    def test_reciprocal_closed_form(self, p_unit, c):
        path = shoot(initial(p_unit, c), RECIPROCAL, 2.0, 1000)
        exact = np.exp(c * path.times)
        assert np.max(np.abs(path.r / exact - 1)) < 1e-8
        np.testing.assert_allclose(path.theta, path.times, atol=1e-12)

    def test_fourth_order(self, p_unit):
        errs = []
        for n in (50, 100):
            path = shoot(initial(p_unit, 1.0, 1.5), RECIPROCAL, 2.0, n)
            errs.append(np.max(np.abs(path.r - np.exp(path.times))))
        assert errs[0] / errs[1] >= 8

    def test_periodic(self, p_unit):
        path = shoot(initial(p_unit, 0.0), RECIPROCAL, 2 * math.pi, 1000)
        assert abs(path.r[-1] - 1) < 1e-6
        assert (path.phi(len(path) - 1) - p_unit.phi.field).norm() < 1e-6

    def test_zero_psi_is_radial(self, p_unit):
        path = shoot(initial(p_unit, 0.4, 0.0), FISHER_RAO, 1.5, 200)
        assert np.all(path.theta == 0.0)
        np.testing.assert_allclose(path.r, 1 + 0.4 * path.times, rtol=1e-13)

    def test_needs_eight_steps(self, p_unit):
        with pytest.raises(ValueError):
            shoot(initial(p_unit, 0.0), RECIPROCAL, 1.0, 7)

    def test_boundary_hit_carries_partial_path(self, p_unit):
        with pytest.raises(BoundaryHitError) as info:
            shoot(initial(p_unit, -1.0, 0.0), FISHER_RAO, 2.0, 400)
        err = info.value
        assert err.t_exit == pytest.approx(1.0, abs=1e-3)
        assert err.boundary == "zero"
        assert 0 < len(err.path) < 401 and err.path.times[-1] < 1.0

    def test_adaptive_flag(self, p_unit):
        path = shoot(initial(p_unit, 0.5), RECIPROCAL, 2.0, 100, adaptive=True)
        assert np.max(np.abs(path.r / np.exp(0.5 * path.times) - 1)) < 1e-9

    def test_great_circle_planarity(self, rng):
        g = Grid.normalized(rng.uniform(0.1, 1, 6))
        p = PolarPoint(1.3, random_sphere_point(rng, g))
        path = shoot(initial(p, 0.2), make_preset("extended"), 1.0, 100)
        a, b = path.phi0.field, path.psi_hat
        for k in (0, 37, 100):
            phi = path.phi(k)
            resid = phi - a * l2_inner(phi, a) - b * l2_inner(phi, b)
            assert resid.norm() < 1e-15
            assert phi.norm() == pytest.approx(1.0, abs=1e-14)

    def test_fisher_rao_matches_straight_line(self, p_unit):
        init = initial(p_unit, 0.3, 0.8)
        path = shoot(init, FISHER_RAO, 1.0, 1000)
        for k in (250, 1000):
            st_ = closed_form("fisher_rao", init, path.times[k])
            assert path.r[k] == pytest.approx(st_.r, rel=1e-10)
            assert path.theta[k] == pytest.approx(st_.theta, rel=1e-10)


class TestShootArc:
    def test_reciprocal_linear(self):
        path = shoot_arc(0.5, 0.7, 1.2, profile_for(RECIPROCAL), 2.0, 100)
        np.testing.assert_allclose(path.s, 0.5 + 0.7 * path.times, rtol=1e-14, atol=1e-14)

    def test_no_angular_speed_is_linear(self):
        path = shoot_arc(0.2, -0.3, 0.0, profile_for(make_preset("extended")), 2.0, 100)
        np.testing.assert_allclose(path.s, 0.2 - 0.3 * path.times, atol=1e-14)

    def test_fisher_rao_exit(self):
        with pytest.raises(BoundaryHitError) as info:
            shoot_arc(0.0, -1.0, 0.0, profile_for(FISHER_RAO), 3.0, 3000)
        assert info.value.t_exit == pytest.approx(2.0, abs=1e-3)

    def test_first_integral(self):
        path = shoot_arc(0.3, 0.5, 0.4, profile_for(make_preset("extended")), 1.0, 1000)
        assert path.drift["first_integral"] < 1e-6

    def test_start_outside(self):
        with pytest.raises(DomainError):
            shoot_arc(-3.0, 0.0, 0.0, profile_for(FISHER_RAO), 1.0, 10)


class TestClosedForm:
    def test_identity(self, p_unit):
        st_ = closed_form("reciprocal", initial(p_unit, 0.3), 0.0)
        assert (st_.r, st_.theta, st_.s) == (1.0, 0.0, 0.0)

    def test_reciprocal(self, p_unit):
        assert closed_form("reciprocal", initial(p_unit, 1.0), 1.0).r == pytest.approx(math.e)

    def test_fisher_rao(self, p_unit):
        st_ = closed_form("fisher_rao", initial(p_unit, 0.0), 1.0)
        assert st_.r == pytest.approx(math.sqrt(2)) and st_.theta == pytest.approx(math.pi / 4)

    def test_unsupported(self, p_unit):
        with pytest.raises(DomainError):
            closed_form("extended", initial(p_unit, 0.0), 1.0)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(FOUR_EXAMPLES), st.floats(0.6, 1.6), st.floats(-0.3, 0.3),
       st.floats(0.0, 1.0))
def test_conservation(name, r0, r_t0, psi):
    g = Grid.uniform(4)
    p = PolarPoint(r0, SpherePoint(g.constant(1.0)))
    path = shoot(initial(p, r_t0, psi), make_preset(name), 1.0, 1000)
    d = path.drift
    assert d["A0"] < 1e-6 and d["energy"] < 1e-6 and d["first_integral"] < 1e-6


class TestResidual:
    @pytest.mark.parametrize("name", FOUR_EXAMPLES)
    def test_geodesic(self, name, p_unit):
        path = shoot(initial(p_unit, 0.2, 0.6), make_preset(name), 1.0, 2000)
        assert levi_civita_residual(path, profile_for(make_preset(name))) < 1e-5

    def test_non_geodesic(self):
        t = np.linspace(0, 3, 200)
        path = path_from_arrays(t, np.sin(t), np.cos(t), 0 * t, 0 * t, profile_for(FISHER_RAO))
        assert levi_civita_residual(path, profile_for(FISHER_RAO)) > 0.1

    def test_constant(self):
        t = np.linspace(0, 1, 20)
        z = np.zeros(20)
        path = path_from_arrays(t, z + 0.5, z, z, z, profile_for(FISHER_RAO))
        assert levi_civita_residual(path, profile_for(FISHER_RAO)) == 0.0

    def test_too_short(self):
        t = np.linspace(0, 1, 10)
        z = np.zeros(10)
        with pytest.raises(ValueError):
            levi_civita_residual(path_from_arrays(t, z, z, z, z, profile_for(FISHER_RAO)),
                                 profile_for(FISHER_RAO))


class TestConnect:
    def test_identical(self, p_unit):
        path, d = connect(p_unit, p_unit, RECIPROCAL)
        assert d == 0.0 and len(path) == 1

    def test_radial(self, p_unit):
        res = connect(p_unit, PolarPoint(3.0, p_unit.phi), FISHER_RAO)
        assert res.distance == pytest.approx(4.0, rel=1e-14)
        assert np.all(res.path.theta == 0)

    def test_reciprocal_oracle(self, p_unit):
        q = PolarPoint(math.e, rotate(p_unit.phi, math.pi / 2))
        assert connect(p_unit, q, RECIPROCAL).distance == pytest.approx(
            math.sqrt(4 + 4 * (math.pi / 2) ** 2), rel=1e-8)

    def test_fisher_rao_oracle(self, p_unit):
        q = PolarPoint(2.0, rotate(p_unit.phi, 1.0))
        d = connect(p_unit, q, FISHER_RAO).distance
        assert d == pytest.approx(2 * (p_unit.phi.field - q.phi.field * 2.0).norm(), rel=1e-8)

    def test_antipodal_reciprocal(self, p_unit):
        q = PolarPoint(1.5, SpherePoint(-p_unit.phi.field))
        res = connect(p_unit, q, RECIPROCAL)
        assert res.distance == pytest.approx(math.hypot(2 * math.log(1.5), 2 * math.pi), rel=1e-8)
        assert np.array_equal(res.path.psi_hat.values, orthonormal_direction(p_unit.phi).values)

    def test_antipodal_fisher_rao_fails(self, p_unit):
        # the minimizer is the straight line through 0, which is not in the domain
        q = PolarPoint(1.0, SpherePoint(-p_unit.phi.field))
        with pytest.raises(ConnectError) as info:
            connect(p_unit, q, FISHER_RAO)
        assert info.value.best is not None

    def test_endpoint_reached(self, p_unit):
        q = PolarPoint(2.0, rotate(p_unit.phi, 1.2))
        res = connect(p_unit, q, make_preset("extended"))
        end = res.path.field(len(res.path) - 1)
        assert (end - q.phi.field * 2.0).norm() < 1e-7
        assert res.path.drift["A0"] < 1e-12

    def test_connect_path_is_geodesic(self, p_unit):
        q = PolarPoint(1.7, rotate(p_unit.phi, 0.9))
        spec = make_preset("extended")
        res = connect(p_unit, q, spec, n_samples=400)
        assert levi_civita_residual(res.path, profile_for(spec)) < 1e-4

    def test_symmetry_and_triangle(self, rng):
        g = Grid.normalized(rng.uniform(0.2, 1, 5))
        spec = make_preset("extended")
        tol = 1e-9
        pts = [PolarPoint(rng.uniform(0.5, 2.5), random_sphere_point(rng, g)) for _ in range(3)]
        d01 = connect(pts[0], pts[1], spec, tol).distance
        d10 = connect(pts[1], pts[0], spec, tol).distance
        d12 = connect(pts[1], pts[2], spec, tol).distance
        d02 = connect(pts[0], pts[2], spec, tol).distance
        assert abs(d01 - d10) < 2 * tol
        assert d02 <= d01 + d12 + 4 * tol

    def test_distance_bounds(self, rng, p_unit):
        profile = profile_for(make_preset("extended"))
        for _ in range(3):
            r1, th = rng.uniform(0.5, 3), rng.uniform(0.1, 2.5)
            q = PolarPoint(r1, rotate(p_unit.phi, th))
            d = connect(p_unit, q, make_preset("extended")).distance
            s0, s1 = float(profile.W(1.0)), float(profile.W(r1))
            assert d >= abs(s1 - s0)
            assert d <= comparison_length(profile, s0, s1, th) + 1e-9


def test_csv_columns(p_unit):
    path = shoot(initial(p_unit, 0.1), RECIPROCAL, 1.0, 16)
    cols = path.columns(include_fields=True)
    assert list(cols)[:7] == ["t", "s", "r", "theta", "s_t", "theta_t", "A0_drift"]
    n = p_unit.phi.grid.n_points
    assert [f"f_{i}" for i in range(n)] == list(cols)[7:]
    k = 9
    np.testing.assert_allclose([cols[f"f_{i}"][k] for i in range(n)], path.field(k).values,
                               rtol=1e-14)
