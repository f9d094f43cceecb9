import math

import numpy as np
import pytest

from lempertkit.competitors import AxisQuotient, LinearSum, maps_into_disc
from lempertkit.domains import BALL, DIAMOND, ellipsoid
from lempertkit.family import GeodesicLeftInverse, GeodesicParams, solve_pair, solve_tangent
from lempertkit.hyperbolic import poincare_distance
from lempertkit.metrics import ball_distance, kappa_ball


def _params(q, r=(1, 1), seed=0):
    rng = np.random.default_rng(seed)
    al = 0.8 * np.sqrt(rng.uniform(size=2)) * np.exp(1j * rng.uniform(-np.pi, np.pi, 2))
    if r[0] == 0:
        al[0] = np.exp(1j * rng.uniform(-np.pi, np.pi))
    return GeodesicParams.from_shape(rng.uniform(0.2, 1.3), *rng.uniform(-np.pi, np.pi, 2), al[0], al[1], r, q)


class TestGeodesicParams:
    @pytest.mark.parametrize("q", [(1, 1), (1, 2), (2, 1), (2, 2)])
    def test_boundary_on_boundary(self, q):
        g = _params(q, seed=3)
        assert g.relation_residual() < 1e-12
        np.testing.assert_allclose(g.boundary_functional(), 1.0, atol=1e-12)
        assert g.maps_into_domain()

    def test_zero_set(self):
        assert _params((1, 1)).zero_set == frozenset({1, 2})
        assert _params((1, 1), r=(0, 1)).zero_set == frozenset({2})

    def test_validation(self):
        with pytest.raises(ValueError):
            GeodesicParams(0.5, 0.5, 1.0, 0.0, 1, 1, 0.0)  # alpha1 on the circle with a zero
        with pytest.raises(ValueError):
            GeodesicParams(0.5, 0.5, 0.0, 0.0, 1, 1, 1.0)  # alpha0 outside the disc
        with pytest.raises(ValueError):
            GeodesicParams(0.5, 0.5, 0.0, 0.0, 2, 1, 0.0)

    def test_derivative(self):
        g = _params((1, 1), seed=5)
        lam, h = 0.3 - 0.2j, 1e-7
        np.testing.assert_allclose((g(lam + h) - g(lam)) / h, g.derivative(lam), rtol=1e-5)

    def test_dict_round_trip(self):
        g = _params((2, 1), seed=4)
        h = GeodesicParams.from_dict(g.to_dict())
        np.testing.assert_allclose(h(0.4j), g(0.4j), atol=1e-15)

    def test_isometry_along_disc(self):
        """Geodesics of the ball are the affine discs; distances match the closed form."""
        g = _params((2, 2), seed=6)
        for s, t in ((0.1, 0.5j), (-0.6, 0.3 + 0.3j)):
            np.testing.assert_allclose(ball_distance(g(s), g(t)), poincare_distance(s, t), atol=1e-10)


class TestLeftInverse:
    @pytest.mark.parametrize("q", [(1, 1), (1, 2), (2, 1), (2, 2)])
    def test_retraction(self, q):
        g = _params(q, seed=8)
        F = GeodesicLeftInverse(g, [np.exp(-1j * np.angle(a)) for a in g.a])
        lam = np.array([0.0, 0.4, -0.5j, 0.3 + 0.6j])
        np.testing.assert_allclose([F(g(x)) for x in lam], lam, atol=1e-9)
        D = ellipsoid(*q)
        assert maps_into_disc(F, D, n=300)


class TestSolver:
    def test_pair_ball(self):
        w, z = np.array([0.2, -0.3j]), np.array([-0.4 + 0.1j, 0.5])
        sol = solve_pair((2, 2), w, z)
        np.testing.assert_allclose(sol.params(sol.sigma), w, atol=1e-9)
        np.testing.assert_allclose(sol.params(sol.zeta), z, atol=1e-9)
        np.testing.assert_allclose(poincare_distance(sol.sigma, sol.zeta), ball_distance(w, z), atol=1e-9)

    def test_tangent_ball(self):
        z, X = np.array([0.3, 0.2j]), np.array([1.0, 1j])
        sol = solve_tangent((2, 2), z, X)
        np.testing.assert_allclose(1.0 / sol.scale, kappa_ball(z, X), rtol=1e-9)

    def test_tangent_diamond_origin(self):
        sol = solve_tangent((1, 1), (0, 0), (1, 1))
        np.testing.assert_allclose(1.0 / sol.scale, 2.0, rtol=1e-9)

    def test_pair_diamond_axes(self):
        sol = solve_pair((1, 1), (0.5, 0), (0, 0.3))
        np.testing.assert_allclose(2 * math.atanh(sol.zeta), poincare_distance(-0.5, 0.3), atol=1e-9)


class TestCompetitors:
    def test_linear_sum(self):
        F = LinearSum(1.0, 1j)
        np.testing.assert_allclose(F((0.2, 0.3)), 0.2 + 0.3j)
        np.testing.assert_allclose(F.derivative((0.2, 0.3), (1, 1)), 1 + 1j)
        assert maps_into_disc(F, DIAMOND)
        with pytest.raises(ValueError):
            LinearSum(1.0, 2.0)

    def test_axis_quotient(self):
        G = AxisQuotient(1.0, 1)
        np.testing.assert_allclose(G((0.5, 0.25)), 0.5)
        assert maps_into_disc(G, DIAMOND)
        assert not maps_into_disc(LinearSum(1.0, 1.0), BALL)
