"""Invariant distances and metrics on the model domains.

``kappa_diamond`` evaluates the quasieffective formula for the diamond: the
maximum of the linear-competitor bound ``m_diamond`` and the smallest
pulled-back ellipsoid metric among the pullbacks whose extremal disc has no
zero in the square-rooted components.  ``kappa_ellipsoid`` solves for the
extremal disc directly and is independent of that formula.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .competitors import (
    AxisQuotient,
    LinearSum,
    best_linear_sum_metric,
    maps_into_disc,
)
from .domains import DIAMOND, DomainSpec, OutsideDomainError, point2, require_inside
from .family import GeodesicParams, check_exponents, solve_tangent
from .hyperbolic import poincare_distance
from .oracle import (
    Budget,
    InvalidFamilyError,
    LowerBound,
    PairProblem,
    SandwichCertificate,
    TangentProblem,
    pair_lower_bound,
    sandwich,
    tangent_lower_bound,
)


class Achiever(str, Enum):
    MDiamond = "MDiamond"
    Pull_E_half_1 = "Pull_E_half_1"  # exponents (1, 2): second coordinate square-rooted
    Pull_E_1_half = "Pull_E_1_half"  # exponents (2, 1): first coordinate square-rooted
    Pull_Ball = "Pull_Ball"
    ClosedForm = "ClosedForm"
    Oracle = "Oracle"


class UncertifiedError(RuntimeError):
    """The sandwich did not close to the requested width."""

    def __init__(self, message: str, certificate: Optional[SandwichCertificate] = None):
        super().__init__(message)
        self.certificate = certificate


@dataclass
class MetricResult:
    value: float
    achiever: Achiever
    certificate: object = None
    branches: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.value >= 0:
            raise ValueError("metric values are nonnegative")

    def to_dict(self) -> dict:
        d = {"value": float(self.value), "achiever": self.achiever.value}
        if self.certificate is not None:
            d["certificate"] = self.certificate.to_dict()
        if self.branches:
            d["branches"] = {k: (None if v is None else float(v)) for k, v in self.branches.items()}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


# ---------------------------------------------------------------------------
# closed forms


def m_diamond(z, X) -> float:
    """``sup_omega |X1 + omega X2| / (1 - |z1 + omega z2|^2)`` over the unit circle."""
    z = require_inside(DIAMOND, z, "z")
    return best_linear_sum_metric(z, point2(X))[0]


def kappa_ball(z, X) -> float:
    z = require_inside(DomainSpec("ball"), z, "z")
    X = point2(X)
    n2 = float(np.vdot(z, z).real)
    zx = abs(np.vdot(z, X))
    x2 = float(np.vdot(X, X).real)
    return math.sqrt(x2 / (1.0 - n2) + zx**2 / (1.0 - n2) ** 2)


def ball_distance(w, z) -> float:
    """Kobayashi distance of the unit ball of C^2, with ``p = artanh``."""
    B = DomainSpec("ball")
    w = require_inside(B, w, "w")
    z = require_inside(B, z, "z")
    num = (1.0 - np.vdot(w, w).real) * (1.0 - np.vdot(z, z).real)
    den = abs(1.0 - np.vdot(w, z)) ** 2
    return math.atanh(math.sqrt(max(1.0 - num / den, 0.0)))


def kappa_disc(z, X) -> float:
    z = require_inside(DomainSpec("disc"), z, "z")
    X = point2(X)
    if X[1] != 0:
        raise ValueError("tangent vectors of the disc slice must have X2 = 0")
    return abs(X[0]) / (1.0 - abs(z[0]) ** 2)


# ---------------------------------------------------------------------------
# ellipsoids through the extremal-disc solver


def extremal_tangent_disc(q, z, X, seed: int = 0, restarts: int = 24):
    """``(kappa, GeodesicParams)`` for ``E{q1,q2}``; raises ``UncertifiedError`` if unsolved."""
    q = check_exponents(q)
    z = require_inside(DomainSpec("ellipsoid", *q), z, "z")
    X = point2(X)
    if not np.any(X):
        return 0.0, None
    sol = solve_tangent(q, z, X, seed=seed, starts_per_chart=restarts)
    if sol is None:
        raise UncertifiedError(f"no extremal disc found for E{q} at {tuple(z)}")
    return 1.0 / sol.scale, sol.params


def kappa_ellipsoid(q1, q2, z, X, seed: int = 0) -> float:
    """Kobayashi–Royden metric of ``{|z1|^q1 + |z2|^q2 < 1}``, ``q_j in {1, 2}``."""
    D = DomainSpec("ellipsoid", q1, q2)
    if D.q1 < 1 or D.q2 < 1:
        raise ValueError("non-convex ellipsoid")
    return extremal_tangent_disc((D.q1, D.q2), z, X, seed)[0]


# ---------------------------------------------------------------------------
# the quasieffective formula


_PULLS = (
    (Achiever.Pull_E_half_1, (1.0, 2.0), (False, True)),
    (Achiever.Pull_E_1_half, (2.0, 1.0), (True, False)),
    (Achiever.Pull_Ball, (2.0, 2.0), (True, True)),
)
TIE_TOLERANCE = 1e-12


def _pullback(z, X, roots):
    w, Y = [], []
    for zj, Xj, root in zip(z, X, roots):
        if root:
            s = cmath.sqrt(zj)  # principal branch
            w.append(s)
            Y.append(Xj / (2.0 * s))
        else:
            w.append(zj)
            Y.append(Xj)
    return np.array(w), np.array(Y)


def kappa_diamond(z, X, seed: int = 0) -> MetricResult:
    """Kobayashi–Royden metric of the diamond by the quasieffective formula.

    A pullback is skipped when a square-rooted coordinate of ``z`` vanishes.
    It counts only when the extremal disc of the ellipsoid is zero-free in
    the square-rooted components; then its value equals the diamond metric,
    otherwise it is merely an upper bound and is ignored.
    """
    z = require_inside(DIAMOND, z, "z")
    X = point2(X)
    m, lin = best_linear_sum_metric(z, X)
    branches = {Achiever.MDiamond.value: m}
    if not np.any(X):
        return MetricResult(0.0, Achiever.MDiamond, lin, branches)
    best = None
    for tag, q, roots in _PULLS:
        if any(r and z[j] == 0 for j, r in enumerate(roots)):
            branches[tag.value] = None
            continue
        w, Y = _pullback(z, X, roots)
        try:
            value, g = extremal_tangent_disc(q, w, Y, seed)
        except UncertifiedError:
            branches[tag.value] = None
            continue
        branches[tag.value] = value
        valid = g is not None and all(g.component_zero_free(j + 1, 1e-7) for j, r in enumerate(roots) if r)
        if valid and (best is None or value < best[0] - TIE_TOLERANCE * max(1.0, value)):
            best = (value, tag, g)
    if best is None or m >= best[0] - TIE_TOLERANCE * max(1.0, m):
        return MetricResult(m, Achiever.MDiamond, lin, branches)
    return MetricResult(best[0], best[1], best[2], branches)


def kappa(D: DomainSpec, z, X, seed: int = 0) -> float:
    """Kobayashi–Royden metric on any supported domain."""
    if D.is_disc:
        return kappa_disc(z, X)
    if D.kind == "ball":
        return kappa_ball(z, X)
    if D.kind == "diamond":
        return kappa_diamond(z, X, seed).value
    return kappa_ellipsoid(D.q1, D.q2, z, X, seed)


# ---------------------------------------------------------------------------
# distances


@dataclass
class DistanceResult:
    value: float
    lower: float
    upper: float
    method: str
    certificate: Optional[SandwichCertificate] = None

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def certified(self) -> bool:
        return self.certificate is None or self.certificate.certified

    def to_dict(self) -> dict:
        d = {"value": float(self.value), "lower": float(self.lower), "upper": float(self.upper),
             "width": float(self.width), "method": self.method, "certified": self.certified}
        if self.certificate is not None:
            d["certificate"] = self.certificate.to_dict()
        return d


def diamond_closed_form(w, z) -> Optional[float]:
    """Exact diamond distance when the pair is on the axes or vertically aligned."""
    w, z = point2(w), point2(z)
    if np.array_equal(w, z):
        return 0.0
    for a, b in ((w, z), (z, w)):
        for i in (0, 1):
            o = 1 - i
            if a[o] == 0 and b[o] == 0:  # same axis: the slice is a geodesic
                return poincare_distance(a[i], b[i])
            if a[o] == 0 and b[i] == 0:  # opposite axes
                return poincare_distance(-abs(a[i]), abs(b[o]))
            if a[o] == 0 and a[i] == b[i]:  # vertical segment over an axis point
                return poincare_distance(0.0, abs(b[o]) / (1.0 - abs(a[i])))
    return None


def kobayashi_distance(D: DomainSpec, w, z, budget: Optional[Budget] = None, strict: bool = False) -> DistanceResult:
    """Kobayashi distance; closed forms where known, else a certified sandwich.

    With ``strict`` an uncertified sandwich raises ``UncertifiedError``;
    otherwise the result carries ``certified = False`` and the achieved width.
    """
    w = require_inside(D, w, "w")
    z = require_inside(D, z, "z")
    exact = None
    if np.array_equal(w, z):
        exact = 0.0
    elif D.is_disc:
        exact = poincare_distance(w[0], z[0])
    elif D.kind == "ball":
        exact = ball_distance(w, z)
    elif D.kind == "diamond":
        exact = diamond_closed_form(w, z)
    if exact is not None:
        return DistanceResult(exact, exact, exact, "closed-form")
    cert = sandwich(D, PairProblem(tuple(w), tuple(z)), budget)
    if strict and not cert.certified:
        raise UncertifiedError(f"sandwich width {cert.width:.3g} exceeds {cert.target:.3g}", cert)
    return DistanceResult(cert.midpoint, cert.lower, cert.upper, "sandwich", cert)


def metric_certificate(D: DomainSpec, z, X, budget: Optional[Budget] = None) -> SandwichCertificate:
    return sandwich(D, TangentProblem(tuple(point2(z)), tuple(point2(X))), budget)


# ---------------------------------------------------------------------------
# Carathéodory lower bounds


def _split_family(family):
    names, maps = [], []
    for item in family:
        (names if isinstance(item, str) else maps).append(item)
    return names, maps


def caratheodory_lower_bound(D: DomainSpec, w, z, family=None, seed: int = 0) -> LowerBound:
    """Sup of ``p(F(w), F(z))`` over a competitor family.

    ``family`` mixes family names (``"linear"``, ``"axis"``, ``"geodesic"``)
    and explicit competitor objects; explicit maps are checked to send ``D``
    into the disc on 10^3 random points first.
    """
    w = require_inside(D, w, "w")
    z = require_inside(D, z, "z")
    names, maps = _split_family(family if family is not None else [])
    if family is None:
        names = None
    best = pair_lower_bound(D, w, z, names, seed=seed) if names is None or names else LowerBound(0.0)
    for F in maps:
        if not maps_into_disc(F, D):
            raise InvalidFamilyError(f"{F!r} does not map {D} into the disc")
        v = poincare_distance(complex(F(w)), complex(F(z)))
        if v > best.value:
            best = LowerBound(v, F, "explicit")
    return best


def caratheodory_metric_lower_bound(D: DomainSpec, z, X, family=None, seed: int = 0) -> LowerBound:
    """Infinitesimal analogue: sup of ``|F'(z) X| / (1 - |F(z)|^2)``."""
    z = require_inside(D, z, "z")
    X = point2(X)
    names, maps = _split_family(family if family is not None else [])
    if family is None:
        names = None
    best = tangent_lower_bound(D, z, X, names, seed=seed) if names is None or names else LowerBound(0.0)
    for F in maps:
        if not maps_into_disc(F, D):
            raise InvalidFamilyError(f"{F!r} does not map {D} into the disc")
        v = abs(complex(F.derivative(z, X))) / (1.0 - abs(complex(F(z))) ** 2)
        if v > best.value:
            best = LowerBound(v, F, "explicit")
    return best
