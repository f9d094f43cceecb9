import json

import numpy as np
import pytest

from lempertkit.domains import (
    BALL,
    DIAMOND,
    DISC,
    DomainSpec,
    OutsideDomainError,
    boundary_gap,
    contains,
    diamond_symmetry,
    ellipsoid,
    from_real,
    random_points,
    real_matrix_of,
    require_inside,
    to_real,
)


class TestDomainSpec:
    def test_membership(self):
        assert contains(DIAMOND, (0.5, 0.49))
        assert not contains(DIAMOND, (0.5, 0.5))
        assert contains(BALL, (0.6, 0.79))
        assert not contains(BALL, (0.6, 0.8))
        assert contains(ellipsoid(2, 1), (0.9, 0.1))
        assert contains(DISC, (0.9, 0.0))
        assert not contains(DISC, (0.1, 0.1))

    def test_boundary_gap(self):
        np.testing.assert_allclose(boundary_gap(DIAMOND, (0.25, 0.25j)), 0.5)
        np.testing.assert_allclose(boundary_gap(BALL, (0.6, 0.0)), 0.64)

    def test_require_inside(self):
        with pytest.raises(OutsideDomainError):
            require_inside(DIAMOND, (0.9, 0.3))
        np.testing.assert_array_equal(require_inside(DIAMOND, (0.1, 0.2j)), [0.1, 0.2j])

    def test_parse_and_json(self):
        for name in ("disc", "ball", "diamond", "ellipsoid:2,1", "ellipsoid:1,2"):
            D = DomainSpec.parse(name)
            assert str(D) == name
            assert DomainSpec.from_json(D.to_json()) == D
            json.loads(D.to_json())

    def test_rejects_nonconvex(self):
        with pytest.raises(ValueError):
            DomainSpec("ellipsoid", 0.5, 1.0)
        with pytest.raises(ValueError):
            DomainSpec("polydisc")

    def test_random_points_inside(self):
        rng = np.random.default_rng(1)
        for D in (DISC, BALL, DIAMOND, ellipsoid(1, 2)):
            P = random_points(D, 200, rng, margin=0.1)
            assert P.shape == (200, 2)
            assert all(D.functional(p) < 0.9 for p in P)


class TestSymmetry:
    def test_family_flag(self):
        assert diamond_symmetry(1j, -1, False, False, True).is_family_member
        assert diamond_symmetry(conj1=True, conj2=True).is_family_member
        assert not diamond_symmetry(conj2=True).is_family_member

    def test_preserves_diamond(self):
        S = diamond_symmetry(np.exp(0.3j), np.exp(-2j), True, False, True)
        P = random_points(DIAMOND, 100, np.random.default_rng(2))
        np.testing.assert_allclose(DIAMOND.functional_array(*S(P).T), DIAMOND.functional_array(*P.T))

    def test_real_matrix(self):
        S = diamond_symmetry(1j, 1.0, False, True, False)
        M = real_matrix_of(S)
        z = np.array([0.1 + 0.2j, -0.3 + 0.05j])
        np.testing.assert_allclose(from_real(M @ to_real(z)), S(z), atol=1e-15)
        np.testing.assert_allclose(M @ M.T, np.eye(4), atol=1e-15)
