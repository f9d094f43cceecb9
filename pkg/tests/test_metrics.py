import json
import math

import numpy as np
import pytest

from lempertkit.competitors import AxisQuotient, LinearSum
from lempertkit.domains import BALL, DIAMOND, DISC, OutsideDomainError, ellipsoid, random_points
from lempertkit.hyperbolic import poincare_distance
from lempertkit.metrics import (
    Achiever,
    MetricResult,
    UncertifiedError,
    ball_distance,
    caratheodory_lower_bound,
    caratheodory_metric_lower_bound,
    kappa,
    kappa_ball,
    kappa_diamond,
    kappa_ellipsoid,
    kobayashi_distance,
    m_diamond,
    metric_certificate,
)
from lempertkit.oracle import Budget, InvalidFamilyError, PairProblem, TangentProblem, sandwich


class TestClosedForms:
    @pytest.mark.parametrize("z,X,exact", [
        ((0, 0), (1, 1), 2.0),
        ((0, 0), (1, 0), 1.0),
        ((0.3, 0), (0, 1), 1 / 0.91),
    ])
    def test_m_diamond(self, z, X, exact):
        np.testing.assert_allclose(m_diamond(z, X), exact, rtol=1e-12)

    @pytest.mark.parametrize("z,X,exact", [
        ((0, 0), (3, 4), 5.0),
        ((0.5, 0), (1, 0), 4 / 3),
        ((0.5, 0), (0, 1), 1 / math.sqrt(0.75)),
    ])
    def test_kappa_ball(self, z, X, exact):
        np.testing.assert_allclose(kappa_ball(z, X), exact, rtol=1e-12)

    def test_kappa_ball_matches_oracle(self):
        rng = np.random.default_rng(11)
        for z in random_points(BALL, 5, rng, margin=0.15):
            X = rng.normal(size=2) + 1j * rng.normal(size=2)
            c = sandwich(BALL, TangentProblem(tuple(z), tuple(X)))
            assert c.lower - 1e-9 <= kappa_ball(z, X) <= c.upper + 1e-9

    def test_ball_distance(self):
        np.testing.assert_allclose(ball_distance((0, 0), (0.5, 0)), math.atanh(0.5), rtol=1e-14)
        # the slice through w orthogonal to w is a disc of radius sqrt(1 - |w|^2)
        np.testing.assert_allclose(ball_distance((0.6, 0), (0.6, 0.4)), math.atanh(0.4 / 0.8), rtol=1e-12)

    def test_rejects_outside(self):
        with pytest.raises(OutsideDomainError):
            m_diamond((0.6, 0.5), (1, 0))
        with pytest.raises(OutsideDomainError):
            kappa_ball((0.8, 0.8), (1, 0))


class TestEllipsoid:
    def test_axis_slice(self):
        np.testing.assert_allclose(kappa_ellipsoid(2, 1, (0, 0), (0, 1)), 1.0, atol=1e-8)

    def test_diamond_origin(self):
        np.testing.assert_allclose(kappa_ellipsoid(1, 1, (0, 0), (1, 1)), 2.0, atol=1e-8)

    def test_ball_agreement(self):
        rng = np.random.default_rng(4)
        for z in random_points(BALL, 20, rng, margin=0.05):
            X = rng.normal(size=2) + 1j * rng.normal(size=2)
            np.testing.assert_allclose(kappa_ellipsoid(2, 2, z, X), kappa_ball(z, X), rtol=1e-6)

    def test_within_sandwich(self):
        z, X = (0.3, 0.1j), (1.0, -0.4)
        c = sandwich(ellipsoid(2, 1), TangentProblem(z, X))
        v = kappa_ellipsoid(2, 1, z, X)
        assert abs(v - c.midpoint) < 1e-4


class TestKappaDiamond:
    def test_origin_is_l1_norm(self):
        r = kappa_diamond((0, 0), (0.3 - 0.4j, 1.2j))
        np.testing.assert_allclose(r.value, 0.5 + 1.2, rtol=1e-12)
        assert r.achiever is Achiever.MDiamond

    def test_axis_slice(self):
        np.testing.assert_allclose(kappa_diamond((0.3, 0), (1, 0)).value, 1 / 0.91, rtol=1e-9)

    def test_generic_point_matches_oracle(self):
        z, X = (0.2, 0.2), (1, -1)
        c = sandwich(DIAMOND, TangentProblem(z, X))
        assert abs(kappa_diamond(z, X).value - c.midpoint) < 1e-4

    def test_zero_vector(self):
        assert kappa_diamond((0.1, 0.2), (0, 0)).value == 0.0

    def test_skips_zero_denominators(self):
        r = kappa_diamond((0.3, 0), (0.2, 1))
        assert r.branches[Achiever.Pull_E_half_1.value] is None
        assert r.branches[Achiever.Pull_Ball.value] is None

    def test_branch_rotation_invariance(self):
        # z1 sits just above the square-root branch cut; rotating it onto the positive axis is a symmetry
        z, X = np.array([-0.3 + 1e-3j, 0.2]), np.array([1.0, 0.5j])
        t = np.exp(-1j * np.angle(z[0]))
        rot = np.array([t, 1.0])
        np.testing.assert_allclose(kappa_diamond(z, X).value, kappa_diamond(rot * z, rot * X).value, rtol=1e-6)

    def test_json(self):
        d = json.loads(kappa_diamond((0.2, 0.1j), (1, 0.3)).to_json())
        assert set(d) >= {"value", "achiever"}

    def test_result_rejects_negative(self):
        with pytest.raises(ValueError):
            MetricResult(-1.0, Achiever.Oracle)

    def test_dispatch(self):
        assert kappa(DISC, (0.5, 0), (1, 0)) == pytest.approx(4 / 3)
        assert kappa(BALL, (0, 0), (3, 4)) == pytest.approx(5.0)
        assert kappa(DIAMOND, (0, 0), (1, 1)) == pytest.approx(2.0)


class TestDistance:
    def test_axis_pair(self):
        r = kobayashi_distance(DIAMOND, (0.5, 0), (0, 0.3))
        np.testing.assert_allclose(r.value, math.atanh(0.8 / 1.15), rtol=1e-14)
        assert abs(r.value - 0.858770) < 1e-4
        assert r.method == "closed-form"

    def test_vertical_pair(self):
        r = kobayashi_distance(DIAMOND, (0.5, 0), (0.5, 0.2))
        np.testing.assert_allclose(r.value, math.atanh(0.4), rtol=1e-12)
        assert abs(r.value - 0.423649) < 1e-6

    def test_same_point(self):
        for D in (DISC, BALL, DIAMOND, ellipsoid(2, 1)):
            assert kobayashi_distance(D, (0.1, 0), (0.1, 0)).value == 0.0

    def test_disc_and_ball(self):
        assert kobayashi_distance(DISC, (0, 0), (0.5, 0)).value == pytest.approx(math.atanh(0.5))
        assert kobayashi_distance(BALL, (0.6, 0), (0.6, 0.4)).value == pytest.approx(math.atanh(0.5))

    def test_sandwich_branch(self):
        r = kobayashi_distance(DIAMOND, (0.2, 0.1j), (-0.3, 0.25))
        assert r.method == "sandwich" and r.certified and r.width < 2e-4
        assert r.lower <= r.value <= r.upper

    def test_strict_raises_when_uncertified(self):
        with pytest.raises(UncertifiedError) as info:
            kobayashi_distance(DIAMOND, (0.2, 0.1j), (-0.3, 0.25), Budget(width=1e-300), strict=True)
        assert info.value.certificate is not None
        r = kobayashi_distance(DIAMOND, (0.2, 0.1j), (-0.3, 0.25), Budget(width=1e-300))
        assert not r.certified


class TestCaratheodory:
    def test_linear_family_axis_pair(self):
        lo = caratheodory_lower_bound(DIAMOND, (0.5, 0), (0, 0.3), ["linear"])
        np.testing.assert_allclose(lo.value, poincare_distance(-0.5, 0.3), atol=1e-9)

    def test_axis_family_vertical(self):
        lo = caratheodory_lower_bound(DIAMOND, (0.5, 0), (0.5, 0.2), ["axis"])
        np.testing.assert_allclose(lo.value, math.atanh(0.4), atol=1e-9)

    def test_explicit_competitor(self):
        lo = caratheodory_lower_bound(DIAMOND, (0.5, 0), (0, 0.3), [AxisQuotient(1.0, 1)])
        assert lo.family == "explicit" and lo.value > 0
        with pytest.raises(InvalidFamilyError):
            caratheodory_lower_bound(BALL, (0.5, 0), (0, 0.3), [LinearSum(1.0, 1.0)])

    def test_same_point(self):
        assert caratheodory_lower_bound(DIAMOND, (0.1, 0.1), (0.1, 0.1)).value == 0.0

    def test_below_distance(self):
        rng = np.random.default_rng(5)
        P = random_points(DIAMOND, 6, rng, margin=0.15)
        for w, z in zip(P[::2], P[1::2]):
            assert caratheodory_lower_bound(DIAMOND, w, z).value <= kobayashi_distance(DIAMOND, w, z).upper + 1e-9

    def test_metric_bound(self):
        lo = caratheodory_metric_lower_bound(DIAMOND, (0.2, 0.2), (1, -1))
        assert lo.value <= metric_certificate(DIAMOND, (0.2, 0.2), (1, -1)).upper + 1e-9
        np.testing.assert_allclose(caratheodory_metric_lower_bound(DIAMOND, (0, 0), (1, 1)).value, 2.0, atol=1e-9)

    def test_pair_problem_certificate(self):
        c = sandwich(DIAMOND, PairProblem((0.5, 0), (0, 0.3)))
        assert c.lower_family in ("linear", "geodesic")
