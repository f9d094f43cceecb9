import math

import numpy as np
import pytest

from lempertkit.hyperbolic import (
    DiscAutomorphism,
    OutsideDiscError,
    circle_sup,
    golden_section_max,
    poincare_distance,
    poincare_distance_array,
    poincare_metric,
    schwarz_pick_check,
    unit_disc_point,
)


class TestDistance:
    def test_origin(self):
        assert poincare_distance(0, 0) == 0.0

    def test_radial(self):
        np.testing.assert_allclose(poincare_distance(0, 0.5), 0.549306, atol=1e-6)
        np.testing.assert_allclose(poincare_distance(0, 0.5), math.atanh(0.5), rtol=1e-15)

    def test_opposite_reals(self):
        # |(-0.5 - 0.3) / (1 + 0.15)| = 0.8 / 1.15
        np.testing.assert_allclose(poincare_distance(-0.5, 0.3), math.atanh(0.8 / 1.15), rtol=1e-14)
        # the six-digit value quoted for this pair is 0.858770
        assert abs(poincare_distance(-0.5, 0.3) - 0.858770) < 1e-4

    def test_symmetric_and_invariant(self):
        rng = np.random.default_rng(0)
        m = DiscAutomorphism(np.exp(0.7j), 0.3 - 0.4j)
        for _ in range(50):
            a, b = 0.9 * np.sqrt(rng.uniform(size=2)) * np.exp(1j * rng.uniform(-np.pi, np.pi, 2))
            assert poincare_distance(a, b) == pytest.approx(poincare_distance(b, a), rel=1e-13)
            assert poincare_distance(m(a), m(b)) == pytest.approx(poincare_distance(a, b), rel=1e-9)

    def test_rejects_boundary(self):
        with pytest.raises(OutsideDiscError):
            poincare_distance(1.0, 0)
        with pytest.raises(OutsideDiscError):
            unit_disc_point(1.2j)

    def test_array_matches_scalar(self):
        a = np.array([0.1, 0.5j, -0.3 + 0.2j])
        b = np.array([0.0, -0.2, 0.7j])
        np.testing.assert_allclose(poincare_distance_array(a, b), [poincare_distance(x, y) for x, y in zip(a, b)])


class TestMetric:
    def test_values(self):
        assert poincare_metric(0, 1) == 1.0
        np.testing.assert_allclose(poincare_metric(0.5, 1), 4 / 3)
        assert poincare_metric(0.3j, 0) == 0.0

    def test_is_derivative_of_distance(self):
        a, v, h = 0.3 + 0.2j, 0.6 - 0.1j, 1e-6
        np.testing.assert_allclose(poincare_distance(a, a + h * v) / h, poincare_metric(a, v), rtol=1e-5)


class TestAutomorphism:
    def test_inverse_and_compose(self):
        m = DiscAutomorphism(np.exp(1.1j), 0.5 + 0.1j)
        lam = np.array([0, 0.3, -0.7j, 0.2 + 0.6j])
        np.testing.assert_allclose(m.inverse()(m(lam)), lam, atol=1e-12)
        n = DiscAutomorphism(-1j, -0.2)
        np.testing.assert_allclose(m.compose(n)(lam), m(n(lam)), atol=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            DiscAutomorphism(1.1, 0.0)
        with pytest.raises(ValueError):
            DiscAutomorphism(1.0, 1.0)

    def test_three_points(self):
        m = DiscAutomorphism(np.exp(-0.4j), -0.3 + 0.5j)
        src = [0.0, 0.5, 0.5j]
        fit = DiscAutomorphism.from_three_points(src, m(np.array(src)))
        np.testing.assert_allclose(fit(np.array([0.1, -0.4j])), m(np.array([0.1, -0.4j])), atol=1e-10)

    def test_derivative(self):
        m = DiscAutomorphism(1j, 0.4)
        lam, h = 0.2 - 0.1j, 1e-7
        np.testing.assert_allclose((m(lam + h) - m(lam)) / h, m.derivative(lam), rtol=1e-6)


class TestSchwarzPick:
    def test_contraction_passes(self):
        pairs = [(0.1, 0.5j), (-0.3, 0.6), (0.0, 0.9)]
        assert schwarz_pick_check(lambda z: z * z, pairs)
        assert schwarz_pick_check(DiscAutomorphism(1j, 0.3), pairs)

    def test_expansion_fails(self):
        assert not schwarz_pick_check(lambda z: min(1.5 * abs(z), 0.99) * np.exp(1j * np.angle(z)), [(0.1, 0.2)])


class TestCircleSup:
    def test_golden(self):
        x, v = golden_section_max(lambda t: -(t - 0.3) ** 2, -1, 1)
        np.testing.assert_allclose([x, v], [0.3, 0.0], atol=1e-9)

    def test_sup(self):
        theta, v = circle_sup(lambda t: abs(1 + 0.5 * np.exp(1j * (t - 2.0))))
        np.testing.assert_allclose([theta, v], [2.0, 1.5], atol=1e-9)
