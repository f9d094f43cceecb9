"""Complex and real geodesics of the diamond and their left inverses."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .competitors import LinearSum
from .domains import DIAMOND, DomainSpec, point2, require_inside
from .family import GeodesicParams
from .hyperbolic import DiscAutomorphism, poincare_distance, unit_disc_point


class PreconditionError(ValueError):
    pass


class NoLinearLeftInverse(RuntimeError):
    pass


LEFT_INVERSE_TOL = 1e-8


def evaluate_geodesic(g: GeodesicParams, lam) -> np.ndarray:
    return g(unit_disc_point(lam))


def sample_lambdas(n: int = 64, radius: float = 0.95) -> np.ndarray:
    """Deterministic points of the disc (sunflower spiral)."""
    k = np.arange(n) + 0.5
    return radius * np.sqrt(k / n) * np.exp(2j * np.pi * k * (math.sqrt(5.0) - 1.0) / 2.0)


def sample_reals(n: int = 64, radius: float = 0.95) -> np.ndarray:
    return np.linspace(-radius, radius, n)


# ---------------------------------------------------------------------------
# geodesics with both components vanishing


def two_zero_params(psi, theta1, theta2, alpha1, alpha2) -> GeodesicParams:
    """Geodesic of the diamond with zeros in both components (``r = (1, 1)``)."""
    return GeodesicParams.from_shape(psi, theta1, theta2, alpha1, alpha2, (1, 1), (1.0, 1.0))


def random_two_zero_params(rng: np.random.Generator, max_alpha: float = 0.9) -> GeodesicParams:
    al = max_alpha * np.sqrt(rng.uniform(size=2)) * np.exp(1j * rng.uniform(-np.pi, np.pi, 2))
    return two_zero_params(rng.uniform(0.1, np.pi / 2 - 0.1), *rng.uniform(-np.pi, np.pi, 2), al[0], al[1])


def geodesic_through(w, u, x1: float) -> GeodesicParams:
    """The geodesic with both zeros, ``f(0) = w`` and ``u1 f1 + u2 f2`` a Möbius map.

    ``u`` is a pair of unimodular numbers and ``x1 = |a1|`` selects a member of
    the one-parameter family; all members share the left inverse built from
    ``u``.  Raises ``ValueError`` when ``x1`` is infeasible.
    """
    w = point2(w)
    u = [complex(v) for v in u]
    c = u[0] * w[0] + u[1] * w[1]
    budget = 1.0 + abs(c) ** 2 - (x1 + abs(w[0]) ** 2 / x1)
    if not x1 > abs(w[0]) or not budget > 2.0 * abs(w[1]):
        raise ValueError("infeasible modulus for the first component")
    # x2 + |w2|^2 / x2 = budget, larger root keeps |alpha2| < 1
    x2 = 0.5 * (budget + math.sqrt(budget**2 - 4.0 * abs(w[1]) ** 2))
    a = (x1 * u[0].conjugate(), x2 * u[1].conjugate())
    al = (-w[0] / a[0], -w[1] / a[1])
    return GeodesicParams(a[0], a[1], al[0], al[1], 1, 1, -c, 1.0, 1.0)


def feasible_moduli(w, u) -> Optional[tuple]:
    """Open interval of admissible ``x1`` for ``geodesic_through``, or ``None``."""
    w = point2(w)
    c = u[0] * w[0] + u[1] * w[1]
    total = 1.0 + abs(c) ** 2 - 2.0 * abs(w[1])
    lo = abs(w[0])
    if not total > 2.0 * lo:
        return None
    # x + |w1|^2 / x < total
    hi = 0.5 * (total + math.sqrt(total**2 - 4.0 * lo**2))
    lo2 = 0.5 * (total - math.sqrt(total**2 - 4.0 * lo**2))
    return (max(lo, lo2), hi)


# ---------------------------------------------------------------------------
# left inverses


def _phases(g: GeodesicParams):
    return [None if abs(a) == 0 else a.conjugate() / abs(a) for a in g.a]


def _fit_post(inner: LinearSum, g: GeodesicParams) -> LinearSum:
    lam = np.array([0.0, 0.5, 0.5j])
    vals = inner(g(lam))
    try:
        post = DiscAutomorphism.from_three_points(vals, lam)
    except ValueError as exc:
        raise NoLinearLeftInverse(str(exc)) from exc
    return LinearSum(inner.tau1, inner.tau2, post)


def left_inverse_for(g: GeodesicParams, samples: int = 64) -> LinearSum:
    """Linear left inverse ``post(tau1 z1 + tau2 z2)`` of a diamond geodesic with both zeros.

    The coefficients are aligned with the phases of ``a_j``; the Möbius
    post-composition is fitted on three points and the result verified on
    ``samples`` further points.
    """
    if g.q != (1.0, 1.0):
        raise PreconditionError("linear left inverses are a property of the diamond")
    if g.zero_set != frozenset({1, 2}):
        raise PreconditionError(f"zero set is {sorted(g.zero_set)}, not [1, 2]")
    ph = _phases(g)
    tau = [1.0 if p is None else p for p in ph]
    F = _fit_post(LinearSum(tau[0], tau[1]), g)
    res = verify_left_inverse(F, g, samples)
    if not res < LEFT_INVERSE_TOL:
        raise NoLinearLeftInverse(f"residual {res:.3g} exceeds {LEFT_INVERSE_TOL:g}")
    return F


def verify_left_inverse(F, g, samples: int = 64) -> float:
    """Max of ``|F(f(lam)) - lam|`` (complex geodesic) or ``|F(gamma(s)) - s|`` (real geodesic)."""
    if isinstance(g, RealGeodesic):
        s = sample_reals(samples)
        return float(max(abs(complex(F(g(t))) - t) for t in s))
    lam = sample_lambdas(samples)
    vals = np.asarray(F(g(lam)), dtype=complex)
    return float(np.max(np.abs(vals - lam)))


def common_linear_left_inverse(f: GeodesicParams, g: GeodesicParams, samples: int = 64) -> Optional[LinearSum]:
    """A single linear left inverse of both discs, or ``None``."""
    pf, pg = _phases(f), _phases(g)
    # phases are defined up to a common factor; compare ratios
    tau = []
    for j in range(2):
        cands = [p for p in (pf[j], pg[j]) if p is not None]
        tau.append(cands)
    options = []
    for t1 in tau[0] or [1.0]:
        for t2 in tau[1] or [1.0]:
            options.append((t1, t2))
    for t1, t2 in options:
        for base in (f, g):
            try:
                F = _fit_post(LinearSum(t1, t2), base)
            except NoLinearLeftInverse:
                continue
            if verify_left_inverse(F, f, samples) < LEFT_INVERSE_TOL and verify_left_inverse(F, g, samples) < LEFT_INVERSE_TOL:
                return F
    return None


# ---------------------------------------------------------------------------
# real geodesics


@dataclass
class RealGeodesic:
    curve: Callable[[float], np.ndarray]
    left_inverse: object = None
    domain: DomainSpec = DIAMOND

    def __call__(self, t: float) -> np.ndarray:
        if not -1.0 < t < 1.0:
            raise ValueError("real geodesics are parametrised by (-1, 1)")
        return np.asarray(self.curve(t), dtype=complex)


def real_geodesic_defect(gamma: RealGeodesic, n: int = 7, radius: float = 0.8, budget=None) -> float:
    """Max over a grid of ``|k_D(gamma(t), gamma(s)) - p(t, s)|``."""
    from .metrics import kobayashi_distance

    ts = np.linspace(-radius, radius, n)
    worst = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            k = kobayashi_distance(gamma.domain, gamma(ts[i]), gamma(ts[j]), budget).value
            worst = max(worst, abs(k - poincare_distance(ts[i], ts[j])))
    return worst


def validate_real_geodesic(gamma: RealGeodesic, tol: float = 2e-4, n: int = 7) -> bool:
    if gamma.left_inverse is not None and not verify_left_inverse(gamma.left_inverse, gamma) < LEFT_INVERSE_TOL:
        return False
    return real_geodesic_defect(gamma, n) < tol


def splice_real_geodesic(f: GeodesicParams, g: GeodesicParams, F=None) -> RealGeodesic:
    """Join ``f`` on ``(-1, 0]`` with ``g`` on ``[0, 1)`` under a common left inverse."""
    if np.max(np.abs(f(0.0) - g(0.0))) > 1e-10:
        raise PreconditionError("the discs do not share the base point f(0) = g(0)")
    if F is None:
        F = common_linear_left_inverse(f, g)
        if F is None:
            raise NoLinearLeftInverse("no common linear left inverse")
    elif not (verify_left_inverse(F, f) < LEFT_INVERSE_TOL and verify_left_inverse(F, g) < LEFT_INVERSE_TOL):
        raise NoLinearLeftInverse("the supplied map is not a left inverse of both discs")

    def curve(t):
        return f(t) if t <= 0 else g(t)

    return RealGeodesic(curve, F)


def common_left_inverse_criterion(w, Xf, Xg, D: DomainSpec = DIAMOND, n: int = 21, tol: float = 1e-6) -> bool:
    """``kappa_D(w; t Xf + (1 - t) Xg) = 1`` for all ``t`` on an ``n``-point grid of [0, 1]."""
    from .metrics import kappa

    w = require_inside(D, w, "w")
    Xf, Xg = point2(Xf), point2(Xg)
    for name, X in (("Xf", Xf), ("Xg", Xg)):
        k = kappa(D, w, X)
        if abs(k - 1.0) > tol:
            raise PreconditionError(f"{name} is not metric-normalised (kappa = {k:.9g})")
    for t in np.linspace(0.0, 1.0, n):
        if abs(kappa(D, w, t * Xf + (1.0 - t) * Xg) - 1.0) > tol:
            return False
    return True


def axis_disc(axis: int) -> GeodesicParams:
    """``lam -> (lam, 0)`` (axis 1) or ``(0, lam)`` (axis 2) as diamond geodesics."""
    if axis == 1:
        return GeodesicParams(1.0, 0.0, 0.0, 0.0, 1, 1, 0.0)
    return GeodesicParams(0.0, 1.0, 0.0, 0.0, 1, 1, 0.0)


def example_real_geodesic() -> RealGeodesic:
    """``t -> (t, 0)`` for ``t <= 0`` and ``(0, t)`` for ``t >= 0`` with left inverse ``z1 + z2``."""
    return splice_real_geodesic(axis_disc(1), axis_disc(2), LinearSum(1.0, 1.0))
