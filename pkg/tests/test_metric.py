import math

import numpy as np
import pytest

from frgeom.coeffs import make_preset, profile_for, radial_functions
from frgeom.errors import ContractError, DomainError
from frgeom.manifold import DensityField, Grid, ScalarField, SpherePoint, l2_inner
from frgeom.metric import (
    G_bar_arc,
    G_bar_polar,
    G_density,
    G_tilde,
    TangentAtArc,
    TangentAtPolar,
    arc_tangent,
    polar_tangent,
)
from frgeom.transforms import ArcPoint, PolarPoint, R_inv, dR_inv, polar, to_arc

from conftest import FOUR_EXAMPLES


def ones(n=3):
    g = Grid.uniform(n)
    return g, DensityField(np.ones(n), g)


class TestGDensity:
    def test_fisher_rao_reference(self):
        _, mu = ones()
        assert G_density(mu, mu, mu, make_preset("fisher_rao")) == pytest.approx(1.0)

    def test_extended_reference(self):
        _, mu = ones()
        assert G_density(mu, mu, mu, make_preset("extended")) == pytest.approx(2.0)

    def test_reciprocal_scaled(self):
        g, mu = ones()
        base = DensityField(4 * np.ones(3), g)
        assert G_density(base, mu, mu, make_preset("reciprocal")) == pytest.approx(1 / 16)

    def test_non_positive_base(self):
        g, mu = ones(2)
        with pytest.raises(DomainError):
            G_density(DensityField(np.array([1.0, 0.0]), g), mu, mu, make_preset("fisher_rao"))


class TestGTilde:
    def test_fisher_rao(self, rng):
        g = Grid.normalized(rng.uniform(0.1, 1, 5))
        h = ScalarField(rng.normal(size=5), g)
        h = h / h.norm()
        f = ScalarField(rng.normal(size=5), g)
        assert G_tilde(f, h, h, make_preset("fisher_rao")) == pytest.approx(4.0)

    def test_extended_radial(self, rng):
        g = Grid.normalized(rng.uniform(0.1, 1, 5))
        f = ScalarField(rng.normal(size=5), g)
        f = f / f.norm()
        assert G_tilde(f, f, f, make_preset("extended")) == pytest.approx(8.0)

    @pytest.mark.parametrize("name", FOUR_EXAMPLES)
    def test_pullback(self, name, rng):
        spec = make_preset(name)
        g = Grid.normalized(rng.uniform(0.1, 1, 6))
        for _ in range(10):
            f = ScalarField(rng.uniform(0.2, 2, 6), g)
            h, k = (ScalarField(rng.normal(size=6), g) for _ in range(2))
            lhs = G_tilde(f, h, k, spec)
            rhs = G_density(R_inv(f), dR_inv(f, h), dR_inv(f, k), spec)
            assert lhs == pytest.approx(rhs, rel=1e-10)


class TestGBar:
    def test_polar_examples(self):
        rf = radial_functions(make_preset("fisher_rao"))
        g = Grid.uniform(2)
        phi = SpherePoint(g.constant(1.0))
        u = ScalarField(np.array([1.0, -1.0]), g)
        zero = g.constant(0.0)
        p = PolarPoint(2.0, phi)
        radial = TangentAtPolar(p, 1.0, zero)
        sph = TangentAtPolar(p, 0.0, u)
        assert G_bar_polar(p, radial, radial, rf) == 4.0
        assert G_bar_polar(p, sph, sph, rf) == 16.0

    def test_arc_examples(self):
        profile = profile_for(make_preset("reciprocal"))
        g = Grid.uniform(2)
        phi = SpherePoint(g.constant(1.0))
        u = ScalarField(np.array([1.0, -1.0]), g)
        q = ArcPoint(0.3, phi)
        radial = TangentAtArc(q, 1.0, g.constant(0.0))
        sph = TangentAtArc(q, 0.0, u)
        assert G_bar_arc(q, radial, radial, profile) == 1.0
        assert G_bar_arc(q, sph, sph, profile) == pytest.approx(4.0)
        assert G_bar_arc(q, radial, sph, profile) == 0.0

    def test_tangency_contract(self):
        g = Grid.uniform(2)
        phi = SpherePoint(g.constant(1.0))
        p = PolarPoint(1.0, phi)
        with pytest.raises(ContractError):
            TangentAtPolar(p, 0.0, g.constant(1.0))
        small = TangentAtPolar(p, 0.0, ScalarField(np.array([1.0, -1.0 + 1e-10]), g))
        assert abs(l2_inner(small.dphi, phi.field)) < 1e-16


def random_inputs(rng, g):
    mu = DensityField(rng.uniform(0.1, 3.0, g.n_points), g)
    alpha, beta = (DensityField(rng.normal(size=g.n_points), g) for _ in range(2))
    return mu, alpha, beta


def four_values(spec, profile, mu, alpha, beta):
    from frgeom.transforms import R_map, dR

    f = R_map(mu)
    h, k = dR(mu, alpha), dR(mu, beta)
    p = polar(f)
    v, w = polar_tangent(f, h, p), polar_tangent(f, k, p)
    rf = profile.rf
    q = to_arc(p, profile)
    return (
        G_density(mu, alpha, beta, spec),
        G_tilde(f, h, k, spec),
        G_bar_polar(p, v, w, rf),
        G_bar_arc(q, arc_tangent(v, q, rf), arc_tangent(w, q, rf), profile),
    )


@pytest.mark.parametrize("name", FOUR_EXAMPLES)
def test_isometry_chain(name, rng):
    spec = make_preset(name)
    profile = profile_for(spec)
    g = Grid.normalized(rng.uniform(0.1, 1, 6))
    for _ in range(20):
        vals = four_values(spec, profile, *random_inputs(rng, g))
        for v in vals[1:]:
            assert v == pytest.approx(vals[0], rel=1e-9)


def test_symmetry_and_positivity(rng):
    spec = make_preset("extended")
    g = Grid.normalized(rng.uniform(0.1, 1, 5))
    for _ in range(20):
        mu, alpha, beta = random_inputs(rng, g)
        assert G_density(mu, alpha, beta, spec) == G_density(mu, beta, alpha, spec)
        assert G_density(mu, alpha, alpha, spec) > 0


def test_bilinearity(rng):
    spec = make_preset("reciprocal_sq")
    g = Grid.normalized(rng.uniform(0.1, 1, 5))
    mu, alpha, beta = random_inputs(rng, g)
    gamma = DensityField(rng.normal(size=5), g)
    lhs = G_density(mu, alpha * 2.5 + gamma, beta, spec)
    rhs = 2.5 * G_density(mu, alpha, beta, spec) + G_density(mu, gamma, beta, spec)
    assert lhs == pytest.approx(rhs, rel=1e-12)


@pytest.mark.parametrize("name", FOUR_EXAMPLES)
def test_weighted_permutation_exact(name, rng):
    spec = make_preset(name)
    profile = profile_for(spec)
    g = Grid.normalized(rng.uniform(0.1, 1, 7))
    for _ in range(5):
        mu, alpha, beta = random_inputs(rng, g)
        perm = rng.permutation(7)
        gp = g.permuted(perm)
        permuted = [x.permuted(perm, gp) for x in (mu, alpha, beta)]
        assert four_values(spec, profile, *permuted) == four_values(spec, profile, mu, alpha, beta)
