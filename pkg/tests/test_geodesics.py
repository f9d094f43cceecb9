import numpy as np
import pytest

from lempertkit.competitors import LinearSum
from lempertkit.domains import BALL, DIAMOND
from lempertkit.family import GeodesicParams
from lempertkit.geodesics import (
    NoLinearLeftInverse,
    PreconditionError,
    RealGeodesic,
    axis_disc,
    common_left_inverse_criterion,
    common_linear_left_inverse,
    evaluate_geodesic,
    example_real_geodesic,
    feasible_moduli,
    geodesic_through,
    left_inverse_for,
    random_two_zero_params,
    real_geodesic_defect,
    sample_lambdas,
    splice_real_geodesic,
    validate_real_geodesic,
    verify_left_inverse,
)
from lempertkit.hyperbolic import OutsideDiscError, poincare_distance
from lempertkit.metrics import kobayashi_distance

DIAGONAL = GeodesicParams(0.5, 0.5, 0.0, 0.0, 1, 1, 0.0)  # lam -> (lam/2, lam/2)


class TestEvaluate:
    def test_axis_disc(self):
        np.testing.assert_allclose(evaluate_geodesic(axis_disc(1), 0.3), [0.3, 0])
        np.testing.assert_allclose(evaluate_geodesic(axis_disc(2), 0.3j), [0, 0.3j])

    def test_maps_into_diamond(self):
        rng = np.random.default_rng(0)
        g = random_two_zero_params(rng)
        lam = 0.999 * np.sqrt(rng.uniform(size=1000)) * np.exp(2j * np.pi * rng.uniform(size=1000))
        f = g(lam)
        assert np.all(np.abs(f[:, 0]) + np.abs(f[:, 1]) < 1)

    def test_rejects_outside_disc(self):
        with pytest.raises(OutsideDiscError):
            evaluate_geodesic(DIAGONAL, 1.0)


class TestLeftInverse:
    @pytest.mark.parametrize("seed", range(5))
    def test_random_two_zero(self, seed):
        g = random_two_zero_params(np.random.default_rng(seed))
        F = left_inverse_for(g)
        assert verify_left_inverse(F, g) < 1e-8

    def test_through_point(self):
        w, u = (0.1 + 0.1j, -0.15), (1.0, np.exp(0.4j))
        lo, hi = feasible_moduli(w, u)
        for x1 in np.linspace(lo, hi, 5)[1:-1]:
            g = geodesic_through(w, u, x1)
            np.testing.assert_allclose(g(0.0), w, atol=1e-12)
            assert verify_left_inverse(left_inverse_for(g), g) < 1e-8

    def test_preconditions(self):
        with pytest.raises(PreconditionError):
            left_inverse_for(GeodesicParams.from_shape(0.7, 0.1, 0.2, np.exp(0.3j), 0.4, (0, 1), (1, 1)))
        sol = GeodesicParams(0.5, 0.5, 0.0, 0.0, 1, 1, 0.0, 2.0, 2.0)
        with pytest.raises(PreconditionError):
            left_inverse_for(sol)

    def test_geodesics_realise_distance(self):
        g = random_two_zero_params(np.random.default_rng(3), max_alpha=0.6)
        for s, t in ((0.0, 0.4), (-0.3j, 0.2 + 0.2j)):
            r = kobayashi_distance(DIAMOND, g(s), g(t))
            assert abs(r.value - poincare_distance(s, t)) < 2e-4
            assert r.lower - 1e-9 <= poincare_distance(s, t) <= r.upper + 1e-9


class TestRealGeodesic:
    def test_example(self):
        gamma = example_real_geodesic()
        assert verify_left_inverse(LinearSum(1.0, 1.0), gamma) < 1e-12
        np.testing.assert_allclose(gamma(-0.4), [-0.4, 0])
        np.testing.assert_allclose(gamma(0.4), [0, 0.4])
        assert validate_real_geodesic(gamma)

    def test_parameter_range(self):
        with pytest.raises(ValueError):
            example_real_geodesic()(1.0)

    def test_diagonal_splice(self):
        gamma = splice_real_geodesic(DIAGONAL, axis_disc(2), LinearSum(1.0, 1.0))
        assert validate_real_geodesic(gamma)

    def test_common_inverse_search(self):
        F = common_linear_left_inverse(DIAGONAL, axis_disc(2))
        assert F is not None
        assert verify_left_inverse(F, DIAGONAL) < 1e-8 and verify_left_inverse(F, axis_disc(2)) < 1e-8

    def test_splice_errors(self):
        with pytest.raises(NoLinearLeftInverse):
            splice_real_geodesic(axis_disc(1), axis_disc(2), LinearSum(1.0, 1j))
        shifted = GeodesicParams(0.5, 0.5, 0.2, 0.0, 1, 1, 0.1)
        with pytest.raises(PreconditionError):
            splice_real_geodesic(shifted, axis_disc(2))

    def test_ball_splice_fails(self):
        # two distinct complex lines through the origin of the ball never form a real geodesic
        gamma = RealGeodesic(lambda t: np.array([t, 0]) if t <= 0 else np.array([0, t]), domain=BALL)
        assert real_geodesic_defect(gamma, n=5) > 1e-2


class TestCriterion:
    def test_diamond_face(self):
        # tangents of the two axis discs span a face of the indicatrix at the origin
        assert common_left_inverse_criterion((0, 0), (1, 0), (0, 1))

    def test_ball_fails(self):
        assert not common_left_inverse_criterion((0, 0), (1, 0), (0, 1), BALL)

    def test_non_normalised(self):
        with pytest.raises(PreconditionError):
            common_left_inverse_criterion((0, 0), (2, 0), (0, 1))

    def test_opposite_phases(self):
        # X_f = (1, 0), X_g = (0, -1): z1 - z2 inverts both, and the segment stays on a face
        assert common_left_inverse_criterion((0, 0), (1, 0), (0, -1))
        assert not common_left_inverse_criterion((0, 0), (1, 0), (-1, 0))


def test_sample_lambdas_inside():
    assert np.all(np.abs(sample_lambdas(200)) < 0.96)
