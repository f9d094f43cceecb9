"""Holomorphic maps into the unit disc used as Carathéodory lower-bound witnesses.

Every competitor exposes ``__call__(z)``, ``derivative(z, X)`` (the complex
derivative applied to ``X``) and ``to_dict``.  Besides the two explicit
families below, ``family.GeodesicLeftInverse`` follows the same protocol.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .domains import DomainSpec, random_points
from .hyperbolic import DiscAutomorphism, circle_sup, poincare_distance


def _unimodular(t, name: str) -> complex:
    t = complex(t)
    if abs(abs(t) - 1.0) > 1e-12:
        raise ValueError(f"{name} must be unimodular, got {t}")
    return t


def _post(post: Optional[DiscAutomorphism], value, dvalue=None):
    if post is None:
        return value if dvalue is None else dvalue
    if dvalue is None:
        return post(value)
    return post.derivative(value) * dvalue


@dataclass(frozen=True)
class LinearSum:
    """``z -> post(tau1 z1 + tau2 z2)``; maps the diamond into the disc."""

    tau1: complex = 1.0
    tau2: complex = 1.0
    post: Optional[DiscAutomorphism] = None

    def __post_init__(self):
        object.__setattr__(self, "tau1", _unimodular(self.tau1, "tau1"))
        object.__setattr__(self, "tau2", _unimodular(self.tau2, "tau2"))

    def _inner(self, z):
        z = np.asarray(z, dtype=complex)
        return self.tau1 * z[..., 0] + self.tau2 * z[..., 1]

    def __call__(self, z):
        return _post(self.post, self._inner(z))

    def derivative(self, z, X):
        X = np.asarray(X, dtype=complex)
        return _post(self.post, self._inner(z), self.tau1 * X[..., 0] + self.tau2 * X[..., 1])

    def to_dict(self) -> dict:
        d = {"variant": "LinearSum", "tau1": [self.tau1.real, self.tau1.imag],
             "tau2": [self.tau2.real, self.tau2.imag]}
        if self.post is not None:
            d["post"] = _aut_dict(self.post)
        return d


@dataclass(frozen=True)
class AxisQuotient:
    """``v -> post(v_other / (1 - tau v_axis))`` with ``axis`` in {1, 2}."""

    tau: complex = 1.0
    axis: int = 1
    post: Optional[DiscAutomorphism] = None

    def __post_init__(self):
        object.__setattr__(self, "tau", _unimodular(self.tau, "tau"))
        if self.axis not in (1, 2):
            raise ValueError("axis must be 1 or 2")

    def _parts(self, z):
        z = np.asarray(z, dtype=complex)
        va, vo = (z[..., 0], z[..., 1]) if self.axis == 1 else (z[..., 1], z[..., 0])
        return va, vo

    def __call__(self, z):
        va, vo = self._parts(z)
        return _post(self.post, vo / (1.0 - self.tau * va))

    def derivative(self, z, X):
        va, vo = self._parts(z)
        Xa, Xo = self._parts(X)
        den = 1.0 - self.tau * va
        d = Xo / den + vo * self.tau * Xa / den**2
        return _post(self.post, vo / den, d)

    def to_dict(self) -> dict:
        d = {"variant": "AxisQuotient", "tau": [self.tau.real, self.tau.imag], "axis": self.axis}
        if self.post is not None:
            d["post"] = _aut_dict(self.post)
        return d


def _aut_dict(m: DiscAutomorphism) -> dict:
    return {"rotation": [m.rotation.real, m.rotation.imag], "center": [m.center.real, m.center.imag]}


def maps_into_disc(F, D: DomainSpec, n: int = 1000, seed: int = 0) -> bool:
    """Sampled check that ``F`` sends ``D`` into the unit disc."""
    pts = random_points(D, n, np.random.default_rng(seed))
    vals = np.array([complex(F(p)) for p in pts])
    return bool(np.all(np.abs(vals) < 1.0))


class InvalidCompetitorError(ValueError):
    pass


def require_competitor(F, D: DomainSpec, n: int = 1000, seed: int = 0):
    if not maps_into_disc(F, D, n, seed):
        raise InvalidCompetitorError(f"{F!r} does not map {D} into the unit disc")
    return F


# ---------------------------------------------------------------------------
# suprema over the explicit families


def best_linear_sum(w, z, n_grid: int = 720):
    """Best ``z1 + omega z2`` for the pair; returns ``(value, LinearSum)``."""
    w = np.asarray(w, dtype=complex)
    z = np.asarray(z, dtype=complex)

    def obj(theta):
        om = cmath.exp(1j * theta)
        a, b = w[0] + om * w[1], z[0] + om * z[1]
        return math.atanh(min(abs((a - b) / (1.0 - b.conjugate() * a)), 1.0 - 1e-17))

    theta, value = circle_sup(obj, n_grid)
    return value, LinearSum(1.0, cmath.exp(1j * theta))


def linear_sum_metric(z, X, theta: float) -> float:
    om = cmath.exp(1j * theta)
    return abs(X[0] + om * X[1]) / (1.0 - abs(z[0] + om * z[1]) ** 2)


def best_linear_sum_metric(z, X, n_grid: int = 720):
    """``sup_omega |X1 + omega X2| / (1 - |z1 + omega z2|^2)``; returns ``(value, LinearSum)``."""
    z = np.asarray(z, dtype=complex)
    X = np.asarray(X, dtype=complex)
    theta, value = circle_sup(lambda t: linear_sum_metric(z, X, t), n_grid)
    return value, LinearSum(1.0, cmath.exp(1j * theta))


def best_axis_quotient(w, z, n_grid: int = 720):
    """Best ``v_other / (1 - tau v_axis)`` over both axes; returns ``(value, AxisQuotient)``."""
    best = (-1.0, None)
    for axis in (1, 2):
        def obj(theta, axis=axis):
            G = AxisQuotient(cmath.exp(1j * theta), axis)
            return poincare_distance(G(w), G(z))

        theta, value = circle_sup(obj, n_grid)
        if value > best[0]:
            best = (value, AxisQuotient(cmath.exp(1j * theta), axis))
    return best


def best_axis_quotient_metric(z, X, n_grid: int = 720):
    best = (-1.0, None)
    for axis in (1, 2):
        def obj(theta, axis=axis):
            G = AxisQuotient(cmath.exp(1j * theta), axis)
            return abs(G.derivative(z, X)) / (1.0 - abs(G(z)) ** 2)

        theta, value = circle_sup(obj, n_grid)
        if value > best[0]:
            best = (value, AxisQuotient(cmath.exp(1j * theta), axis))
    return best


def competitor_from_dict(d: dict):
    from .family import GeodesicLeftInverse, GeodesicParams

    def c(v):
        return complex(v[0], v[1])

    post = None
    if "post" in d:
        post = DiscAutomorphism(c(d["post"]["rotation"]), c(d["post"]["center"]))
    if d["variant"] == "LinearSum":
        return LinearSum(c(d["tau1"]), c(d["tau2"]), post)
    if d["variant"] == "AxisQuotient":
        return AxisQuotient(c(d["tau"]), int(d["axis"]), post)
    if d["variant"] == "GeodesicLeftInverse":
        return GeodesicLeftInverse(GeodesicParams.from_dict(d["params"]), [c(p) for p in d["phases"]])
    raise ValueError(f"unknown competitor variant {d['variant']!r}")
