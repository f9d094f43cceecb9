"""Two-sided certificates for invariant distances and metrics.

Upper bounds come from explicit analytic discs checked to map into the domain
with a margin; lower bounds come from holomorphic maps into the unit disc.  On
the convex model domains the two meet (Lempert), so the width of a
certificate measures numerical quality only.

Upper discs are produced two ways:

* the extremal-disc solver of ``family`` gives a rational disc whose boundary
  lies on the boundary of the domain; it is pulled inside by ``lam -> rho lam``
  and re-interpolated with an affine correction;
* a penalty method over polynomial discs, which needs nothing but the
  defining functional and serves as a fallback.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.optimize import minimize

from .competitors import (
    LinearSum,
    best_axis_quotient,
    best_axis_quotient_metric,
    best_linear_sum,
    best_linear_sum_metric,
    competitor_from_dict,
)
from .domains import DomainSpec, point2, require_inside
from .family import (
    SUPPORTED_EXPONENTS,
    GeodesicLeftInverse,
    GeodesicParams,
    solve_pair,
    solve_tangent,
)
from .hyperbolic import poincare_distance

ADMISSIBLE_MARGIN = 1e-6
COARSE_SAMPLES = 512
FINE_SAMPLES = 4096
SHRINK_STEPS = tuple(np.geomspace(1e-8, 0.2, 45))


# ---------------------------------------------------------------------------
# analytic discs


@dataclass(frozen=True)
class AnalyticDisc:
    """``f_j(lam) = N_j(lam) / (1 - conj(pole) lam)**power``.

    ``power = 0`` gives the polynomial discs of the penalty optimizer.
    """

    num1: tuple
    num2: tuple
    pole: complex = 0j
    power: int = 0

    def __post_init__(self):
        object.__setattr__(self, "num1", tuple(complex(c) for c in self.num1))
        object.__setattr__(self, "num2", tuple(complex(c) for c in self.num2))
        object.__setattr__(self, "pole", complex(self.pole))
        if not abs(self.pole) < 1.0:
            raise ValueError("pole parameter must lie in the open disc")

    @property
    def degree(self) -> int:
        return max(len(self.num1), len(self.num2)) - 1

    def __call__(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=complex)
        den = (1.0 - self.pole.conjugate() * lam) ** self.power
        return np.stack([P.polyval(lam, self.num1) / den, P.polyval(lam, self.num2) / den], axis=-1)

    def derivative(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=complex)
        pc = self.pole.conjugate()
        d = 1.0 - pc * lam
        out = []
        for n in (self.num1, self.num2):
            out.append((P.polyval(lam, P.polyder(n)) * d + self.power * pc * P.polyval(lam, n)) / d ** (self.power + 1))
        return np.stack(out, axis=-1)

    def boundary_functional(self, D: DomainSpec, n: int = COARSE_SAMPLES) -> np.ndarray:
        f = self(np.exp(2j * np.pi * np.arange(n) / n))
        return D.functional_array(f[:, 0], f[:, 1])

    def is_admissible(self, D: DomainSpec, n: int = COARSE_SAMPLES, margin: float = ADMISSIBLE_MARGIN) -> bool:
        return bool(np.max(self.boundary_functional(D, n)) <= 1.0 - margin)

    def shifted(self, c0, c1) -> "AnalyticDisc":
        """Add the affine map ``c0 + c1 lam`` (componentwise)."""
        den = np.array([1.0 + 0j])
        for _ in range(self.power):
            den = P.polymul(den, [1.0, -self.pole.conjugate()])
        nums = []
        for n, a, b in zip((self.num1, self.num2), c0, c1):
            nums.append(P.polyadd(n, P.polymul([a, b], den)))
        return AnalyticDisc(nums[0], nums[1], self.pole, self.power)

    @classmethod
    def from_geodesic(cls, g: GeodesicParams, rho: float = 1.0) -> "AnalyticDisc":
        """The disc ``lam -> g(rho lam)``."""
        (n1, n2), _ = g._polys
        k = np.arange(max(len(n1), len(n2)))
        return cls(n1 * rho ** k[: len(n1)], n2 * rho ** k[: len(n2)], rho * g.alpha0, 2)

    def to_dict(self) -> dict:
        c = lambda v: [v.real, v.imag]  # noqa: E731
        return {"num1": [c(v) for v in self.num1], "num2": [c(v) for v in self.num2],
                "pole": c(self.pole), "power": self.power}

    @classmethod
    def from_dict(cls, d: dict) -> "AnalyticDisc":
        c = lambda v: complex(v[0], v[1])  # noqa: E731
        return cls([c(v) for v in d["num1"]], [c(v) for v in d["num2"]], c(d["pole"]), int(d["power"]))


def _final_check(disc: AnalyticDisc, D: DomainSpec) -> bool:
    return disc.is_admissible(D, COARSE_SAMPLES) and disc.is_admissible(D, FINE_SAMPLES)


@dataclass
class UpperBound:
    """An admissible disc with ``disc(sigma) = w, disc(zeta) = z`` (pair problem,
    ``value = p(sigma, zeta)``) or ``disc(0) = z, disc'(0) = X / value``."""

    value: float
    disc: Optional[AnalyticDisc]
    sigma: float = 0.0
    zeta: float = 0.0
    method: str = ""
    extremal: object = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {"value": self.value, "sigma": self.sigma, "zeta": self.zeta, "method": self.method,
                "disc": None if self.disc is None else self.disc.to_dict()}


def _supported(D: DomainSpec) -> bool:
    return D.q1 in SUPPORTED_EXPONENTS and D.q2 in SUPPORTED_EXPONENTS


# ---------------------------------------------------------------------------
# upper bounds from the extremal-disc solver


def _smallest_shrink(build, lo_ok=lambda d: True):
    """Smallest ``delta`` on the ladder (then refined by bisection in log scale)
    for which ``build(delta)`` returns an admissible disc."""
    prev = None
    for delta in SHRINK_STEPS:
        if not lo_ok(delta):
            prev = delta
            continue
        disc = build(delta)
        if disc is not None:
            if prev is None:
                return delta, disc
            lo, hi, best = math.log(prev), math.log(delta), (delta, disc)
            for _ in range(10):
                mid = 0.5 * (lo + hi)
                d = math.exp(mid)
                cand = build(d) if lo_ok(d) else None
                if cand is not None:
                    hi, best = mid, (d, cand)
                else:
                    lo = mid
            return best
        prev = delta
    return None


def _shrunk_pair_disc(D: DomainSpec, g: GeodesicParams, s: float, w, z) -> Optional[UpperBound]:
    f_w, f_z = g(-s), g(s)

    def build(delta):
        rho = 1.0 - delta
        sig, zet = -s / rho, s / rho
        c1 = ((z - f_z) - (w - f_w)) / (zet - sig)
        c0 = (w - f_w) - c1 * sig
        disc = AnalyticDisc.from_geodesic(g, rho).shifted(c0, c1)
        return disc if _final_check(disc, D) else None

    found = _smallest_shrink(build, lambda d: s < 1.0 - d)
    if found is None:
        return None
    rho = 1.0 - found[0]
    return UpperBound(poincare_distance(-s / rho, s / rho), found[1], -s / rho, s / rho, "extremal")


def _shrunk_tangent_disc(D: DomainSpec, g: GeodesicParams, scale: float, z, X) -> Optional[UpperBound]:
    f0, d0 = g(0.0), g.derivative(0.0)

    def build(delta):
        rho = 1.0 - delta
        disc = AnalyticDisc.from_geodesic(g, rho).shifted(z - f0, rho * (scale * X - d0))
        return disc if _final_check(disc, D) else None

    found = _smallest_shrink(build)
    if found is None:
        return None
    return UpperBound(1.0 / ((1.0 - found[0]) * scale), found[1], 0.0, 0.0, "extremal")


def _disc_slice_pair(w, z) -> UpperBound:
    """Exact Möbius disc of the slice ``D x {0}`` through ``w1, z1`` (shrunk)."""
    w1, z1 = complex(w[0]), complex(z[0])
    u = (z1 - w1) / (1.0 - w1.conjugate() * z1)
    d = math.atanh(min(abs(u), 1.0 - 1e-17))
    s = math.tanh(d / 2.0)
    rot = u / abs(u)
    # f(lam) = (rot (lam + s) + w1 (1 + s lam)) / ((1 + s lam) + conj(w1) rot (lam + s))
    num = np.array([rot * s + w1, rot + w1 * s])
    den = np.array([1.0 + w1.conjugate() * rot * s, s + w1.conjugate() * rot])
    pole = -(den[1] / den[0]).conjugate()
    num = num / den[0]
    D = DomainSpec("disc")
    for delta in SHRINK_STEPS:
        rho = 1.0 - delta
        if not s < rho:
            continue
        disc = AnalyticDisc(num * np.array([1.0, rho]), [0j], pole * rho, 1)
        if _final_check(disc, D):
            sig, zet = -s / rho, s / rho
            return UpperBound(poincare_distance(sig, zet), disc, sig, zet, "mobius")
    return UpperBound(math.inf, None, method="mobius")


# ---------------------------------------------------------------------------
# penalty method over polynomial discs


def _boundary_points(n: int = COARSE_SAMPLES) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(n) / n)


def _sig(u: float) -> float:
    return 0.5 * (1.0 + math.tanh(0.5 * u))


def _poly_pair_coeffs(x, w, z, degree):
    """Coefficients of ``w + lam ((z - w)/zeta + (lam - zeta) P(lam))``."""
    zeta = _sig(x[0])
    k = max(degree - 1, 0)
    coeffs = []
    for j in range(2):
        p = x[1 + 2 * k * j: 1 + 2 * k * (j + 1)]
        pc = p[:k] + 1j * p[k:] if k else np.zeros(0)
        inner = P.polyadd([(z[j] - w[j]) / zeta], P.polymul([-zeta, 1.0], pc) if k else [0.0])
        coeffs.append(P.polyadd([w[j]], P.polymul([0.0, 1.0], inner)))
    return zeta, coeffs


def _poly_tangent_coeffs(x, z, X, degree):
    """Coefficients of ``z + lam X / kappa + lam^2 P(lam)``."""
    kappa = math.exp(x[0])
    k = max(degree - 1, 0)
    coeffs = []
    for j in range(2):
        p = x[1 + 2 * k * j: 1 + 2 * k * (j + 1)]
        pc = p[:k] + 1j * p[k:] if k else np.zeros(0)
        c = np.zeros(degree + 1, dtype=complex)
        c[0] = z[j]
        if degree >= 1:
            c[1] = X[j] / kappa
        c[2:2 + len(pc)] = pc
        coeffs.append(c)
    return kappa, coeffs


def _penalised(D, objective, coeffs_of, x0, lam, margin):
    def total(x, mu):
        with np.errstate(over="ignore", invalid="ignore"):
            val, coeffs = coeffs_of(x)
            f1, f2 = P.polyval(lam, coeffs[0]), P.polyval(lam, coeffs[1])
            excess = np.maximum(D.functional_array(f1, f2) - (1.0 - margin), 0.0)
            out = objective(val) + mu * float(np.sum(excess**2))
        # keep the line search away from overflow
        return out if math.isfinite(out) else 1e100

    x = np.asarray(x0, dtype=float)
    mu = 10.0
    for _round in range(6):
        with np.errstate(over="ignore", invalid="ignore"):
            res = minimize(total, x, args=(mu,), method="BFGS", options={"maxiter": 200, "gtol": 1e-10})
        if np.all(np.isfinite(res.x)):
            x = res.x
        mu *= 10.0
    return x


def _restore(D: DomainSpec, coeffs, t_lo: float) -> Optional[float]:
    """Largest ``t`` in ``(t_lo, 1]`` with ``lam -> f(t lam)`` admissible (bisection)."""

    def disc_at(t):
        k = np.arange(len(coeffs[0]))
        return AnalyticDisc(coeffs[0] * t**k, coeffs[1] * t**k[: len(coeffs[1])])

    if _final_check(disc_at(1.0), D):
        return 1.0
    lo, hi = t_lo, 1.0
    if not disc_at(lo + 1e-12).is_admissible(D):
        return None
    lo = lo + 1e-12
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        if disc_at(mid).is_admissible(D):
            lo = mid
        else:
            hi = mid
    while lo > t_lo and not _final_check(disc_at(lo), D):
        lo = t_lo + 0.5 * (lo - t_lo)
        if lo - t_lo < 1e-12:
            return None
    return lo


def _pad(x, k_old: int, k_new: int) -> np.ndarray:
    """Embed the parameters of degree ``k_old + 1`` into degree ``k_new + 1`` (zero new coefficients)."""
    out = np.zeros(1 + 4 * k_new)
    out[0] = x[0]
    for block in range(4):
        out[1 + block * k_new: 1 + block * k_new + k_old] = x[1 + block * k_old: 1 + (block + 1) * k_old]
    return out


def _polynomial_upper(D, objective, coeffs_of, x_first, degree, restarts, seed, finish):
    """Penalty method over polynomial discs of rising degree.

    Each degree starts from the optimum of the previous one (restart 0) or a
    perturbation of it, so raising the degree never loses ground.
    """
    lam = _boundary_points()
    best = UpperBound(math.inf, None, method="polynomial")
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        x = np.array([x_first + (rng.normal(0.0, 0.5) if r else 0.0)])
        k_old = 0
        for deg in range(1, degree + 1):
            k = deg - 1
            x = _pad(x, k_old, k)
            if r > 0 and k > k_old:
                x[1:] += rng.normal(0.0, 0.05, 4 * k)
            k_old = k
            x = _penalised(D, objective, lambda x_, deg=deg: coeffs_of(x_, deg), x, lam, ADMISSIBLE_MARGIN)
            cand = finish(x, deg)
            if cand is not None and cand.value < best.value:
                best = cand
    return best


def polynomial_pair_upper(D: DomainSpec, w, z, degree: int = 4, restarts: int = 4, seed: int = 0) -> UpperBound:
    """Penalty-method upper bound for the Lempert function over polynomial discs."""
    w, z = point2(w), point2(z)

    def finish(x, deg):
        zeta, coeffs = _poly_pair_coeffs(x, w, z, deg)
        t = _restore(D, coeffs, zeta)
        if t is None:
            return None
        kk = np.arange(len(coeffs[0]))
        return UpperBound(math.atanh(zeta / t), AnalyticDisc(coeffs[0] * t**kk, coeffs[1] * t**kk), 0.0, zeta / t,
                          "polynomial")

    return _polynomial_upper(D, lambda v: math.atanh(min(v, 1 - 1e-16)),
                             lambda x_, deg: _poly_pair_coeffs(x_, w, z, deg), 1.0, degree, restarts, seed, finish)


def polynomial_tangent_upper(D: DomainSpec, z, X, degree: int = 4, restarts: int = 4, seed: int = 0) -> UpperBound:
    """Penalty-method upper bound for the Kobayashi–Royden metric over polynomial discs."""
    z, X = point2(z), point2(X)
    nx = float(np.linalg.norm(X))

    def finish(x, deg):
        kappa, coeffs = _poly_tangent_coeffs(x, z, X, deg)
        t = _restore(D, coeffs, 0.0)
        if t is None:
            return None
        kk = np.arange(len(coeffs[0]))
        return UpperBound(kappa / t, AnalyticDisc(coeffs[0] * t**kk, coeffs[1] * t**kk), method="polynomial")

    x_first = math.log(nx / max(1.0 - D.functional(z), 1e-3))
    return _polynomial_upper(D, lambda v: v, lambda x_, deg: _poly_tangent_coeffs(x_, z, X, deg), x_first, degree,
                             restarts, seed, finish)


# ---------------------------------------------------------------------------
# public upper bounds


def lempert_upper(D: DomainSpec, w, z, degree: int = 4, restarts: int = 8, seed: int = 0) -> UpperBound:
    """Upper bound for the Lempert function of ``D`` at ``(w, z)``.

    The extremal-disc solver runs with ``restarts`` rounds over its charts; if
    it fails, the polynomial penalty method runs for every degree up to
    ``degree`` and the best admissible disc wins.
    """
    w = require_inside(D, w, "w")
    z = require_inside(D, z, "z")
    if np.array_equal(w, z):
        return UpperBound(0.0, AnalyticDisc([w[0]], [w[1]]), 0.0, 0.0, "constant")
    if D.is_disc:
        return _disc_slice_pair(w, z)
    if _supported(D):
        sol = solve_pair(D.exponents, w, z, seed=seed, starts_per_chart=restarts)
        if sol is not None:
            up = _shrunk_pair_disc(D, sol.params, sol.zeta, w, z)
            if up is not None:
                up.extremal = sol
                return up
    return polynomial_pair_upper(D, w, z, degree, max(restarts // 4, 1), seed)


def kappa_upper(D: DomainSpec, z, X, degree: int = 4, restarts: int = 8, seed: int = 0) -> UpperBound:
    """Upper bound for the Kobayashi–Royden metric of ``D`` at ``(z; X)``."""
    z = require_inside(D, z, "z")
    X = point2(X)
    if not np.any(X):
        return UpperBound(0.0, AnalyticDisc([z[0]], [z[1]]), method="constant")
    if D.is_disc:
        if X[1] != 0:
            raise ValueError("tangent vectors of the disc slice must have X2 = 0")
        v = abs(X[0]) / (1.0 - abs(z[0]) ** 2)
        for delta in SHRINK_STEPS:
            rho = 1.0 - delta
            # lam -> (z1 + rho u lam) / (1 + rho conj(z1) u lam), derivative rho u (1 - |z1|^2) at 0
            u = X[0] / abs(X[0])
            disc = AnalyticDisc([z[0], rho * u], [0j], -rho * z[0] * u.conjugate(), 1)
            if _final_check(disc, D):
                return UpperBound(v / rho, disc, method="mobius")
        return UpperBound(math.inf, None, method="mobius")
    if _supported(D):
        sol = solve_tangent(D.exponents, z, X, seed=seed, starts_per_chart=restarts)
        if sol is not None:
            up = _shrunk_tangent_disc(D, sol.params, sol.scale, z, X)
            if up is not None:
                up.extremal = sol
                return up
    return polynomial_tangent_upper(D, z, X, degree, max(restarts // 4, 1), seed)


# ---------------------------------------------------------------------------
# lower bounds


class InvalidFamilyError(ValueError):
    pass


EXPLICIT_FAMILIES = ("linear", "axis")


@dataclass
class LowerBound:
    value: float
    witness: object = None
    family: str = ""

    def to_dict(self) -> dict:
        return {"value": self.value, "family": self.family,
                "witness": None if self.witness is None else self.witness.to_dict()}


def default_families(D: DomainSpec) -> tuple:
    if D.kind == "diamond":
        return ("linear", "axis", "geodesic")
    if D.is_disc:
        return ("linear",)
    return ("geodesic",)


def _check_families(D: DomainSpec, families) -> tuple:
    families = tuple(families)
    for fam in families:
        if fam not in EXPLICIT_FAMILIES + ("geodesic",):
            raise InvalidFamilyError(f"unknown competitor family {fam!r}")
        if fam in EXPLICIT_FAMILIES and D.kind not in ("diamond", "disc"):
            raise InvalidFamilyError(f"the {fam} family does not map {D} into the disc")
        if fam == "geodesic" and not _supported(D):
            raise InvalidFamilyError(f"no geodesic left inverses for {D}")
    return families


def pair_lower_bound(D: DomainSpec, w, z, families=None, geodesic: Optional[GeodesicParams] = None,
                     seed: int = 0, restarts: int = 8) -> LowerBound:
    """``max p(F(w), F(z))`` over the requested competitor families.

    ``geodesic`` supplies the extremal disc for the ``geodesic`` family; when
    omitted it is solved for.
    """
    w, z = point2(w), point2(z)
    families = _check_families(D, default_families(D) if families is None else families)
    best = LowerBound(0.0, None, "")
    if np.array_equal(w, z):
        return best
    if D.is_disc:
        F = LinearSum(1.0, 1.0)
        return LowerBound(poincare_distance(F(w), F(z)), F, "linear")
    for fam in families:
        if fam == "linear":
            v, F = best_linear_sum(w, z)
        elif fam == "axis":
            v, F = best_axis_quotient(w, z)
        else:
            g = geodesic
            if g is None:
                sol = solve_pair(D.exponents, w, z, seed=seed, starts_per_chart=restarts)
                if sol is None:
                    continue
                g = sol.params
            F = GeodesicLeftInverse(g)
            v = poincare_distance(F(w), F(z))
        if v > best.value:
            best = LowerBound(v, F, fam)
    return best


def tangent_lower_bound(D: DomainSpec, z, X, families=None, geodesic: Optional[GeodesicParams] = None,
                        seed: int = 0, restarts: int = 8) -> LowerBound:
    """``max |F'(z) X| / (1 - |F(z)|^2)`` over the requested competitor families."""
    z, X = point2(z), point2(X)
    families = _check_families(D, default_families(D) if families is None else families)
    best = LowerBound(0.0, None, "")
    if not np.any(X):
        return best
    if D.is_disc:
        F = LinearSum(1.0, 1.0)
        return LowerBound(abs(X[0]) / (1.0 - abs(z[0]) ** 2), F, "linear")
    for fam in families:
        if fam == "linear":
            v, F = best_linear_sum_metric(z, X)
        elif fam == "axis":
            v, F = best_axis_quotient_metric(z, X)
        else:
            g = geodesic
            if g is None:
                sol = solve_tangent(D.exponents, z, X, seed=seed, starts_per_chart=restarts)
                if sol is None:
                    continue
                g = sol.params
            F = GeodesicLeftInverse(g)
            v = abs(F.derivative(z, X)) / (1.0 - abs(F(z)) ** 2)
        if v > best.value:
            best = LowerBound(v, F, fam)
    return best


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class PairProblem:
    w: tuple
    z: tuple

    def to_dict(self) -> dict:
        return {"kind": "pair", "w": _c2(self.w), "z": _c2(self.z)}


@dataclass(frozen=True)
class TangentProblem:
    z: tuple
    X: tuple

    def to_dict(self) -> dict:
        return {"kind": "tangent", "z": _c2(self.z), "X": _c2(self.X)}


def _c2(v):
    return [[complex(c).real, complex(c).imag] for c in v]


@dataclass(frozen=True)
class Budget:
    """Oracle effort: polynomial degree cap, solver restarts (rounds over the
    charts), target width and seed."""

    degree: int = 4
    restarts: int = 24
    width: float = 2e-4
    seed: int = 0

    def __post_init__(self):
        if self.degree < 1 or self.degree > 6:
            raise ValueError("degree must be between 1 and 6")
        if self.restarts < 1:
            raise ValueError("restarts must be positive")
        if not self.width > 0:
            raise ValueError("width target must be positive")


@dataclass
class SandwichCertificate:
    lower: float
    upper: float
    lower_witness: object = None
    upper_witness: Optional[AnalyticDisc] = None
    problem: object = None
    domain: Optional[DomainSpec] = None
    target: float = 2e-4
    lower_family: str = ""
    upper_method: str = ""
    points: tuple = (0.0, 0.0)
    extremal: object = field(default=None, repr=False)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def consistent(self) -> bool:
        return bool(self.lower <= self.upper + 1e-9)

    @property
    def certified(self) -> bool:
        return bool(self.consistent and self.width < self.target)

    def to_dict(self) -> dict:
        return {
            "domain": None if self.domain is None else self.domain.to_dict(),
            "problem": None if self.problem is None else self.problem.to_dict(),
            "lower": float(self.lower),
            "upper": float(self.upper),
            "width": float(self.width),
            "midpoint": float(self.midpoint),
            "certified": self.certified,
            "target": self.target,
            "lower_witness": None if self.lower_witness is None else self.lower_witness.to_dict(),
            "lower_family": self.lower_family,
            "upper_witness": None if self.upper_witness is None else self.upper_witness.to_dict(),
            "upper_method": self.upper_method,
            "upper_points": [float(v) for v in self.points],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SandwichCertificate":
        prob = d.get("problem")
        c = lambda v: complex(v[0], v[1])  # noqa: E731
        if prob is not None:
            if prob["kind"] == "pair":
                prob = PairProblem(tuple(map(c, prob["w"])), tuple(map(c, prob["z"])))
            else:
                prob = TangentProblem(tuple(map(c, prob["z"])), tuple(map(c, prob["X"])))
        return cls(
            d["lower"], d["upper"],
            None if d["lower_witness"] is None else competitor_from_dict(d["lower_witness"]),
            None if d["upper_witness"] is None else AnalyticDisc.from_dict(d["upper_witness"]),
            prob, None if d["domain"] is None else DomainSpec.from_dict(d["domain"]), d["target"],
            d.get("lower_family", ""), d.get("upper_method", ""), tuple(d.get("upper_points", (0.0, 0.0))),
        )


def recheck(cert: SandwichCertificate, n: int = FINE_SAMPLES) -> dict:
    """Re-evaluate both witnesses of a certificate from scratch."""
    D, prob = cert.domain, cert.problem
    out = {"upper_admissible": cert.upper_witness is not None and cert.upper_witness.is_admissible(D, n)}
    F = cert.lower_witness
    if isinstance(prob, PairProblem):
        sig, zet = cert.points
        if cert.upper_witness is not None:
            out["upper_interpolation"] = float(max(
                np.max(np.abs(cert.upper_witness(sig) - np.asarray(prob.w))),
                np.max(np.abs(cert.upper_witness(zet) - np.asarray(prob.z)))))
            out["upper_value"] = poincare_distance(sig, zet)
        out["lower_value"] = 0.0 if F is None else poincare_distance(complex(F(prob.w)), complex(F(prob.z)))
    else:
        z, X = np.asarray(prob.z), np.asarray(prob.X)
        if cert.upper_witness is not None:
            d = cert.upper_witness.derivative(0.0)
            out["upper_interpolation"] = float(np.max(np.abs(cert.upper_witness(0.0) - z)))
            out["upper_value"] = float(np.linalg.norm(X) / np.linalg.norm(d))
        out["lower_value"] = 0.0 if F is None else abs(complex(F.derivative(z, X))) / (1.0 - abs(complex(F(z))) ** 2)
    return out


def sandwich(D: DomainSpec, problem, budget: Optional[Budget] = None) -> SandwichCertificate:
    """Two-sided certificate for a distance (``PairProblem``) or metric
    (``TangentProblem``) on a convex model domain.

    The result carries ``certified = False`` when the width target is missed;
    it is never raised as an error here.
    """
    budget = budget or Budget()
    if isinstance(problem, PairProblem):
        w = require_inside(D, problem.w, "w")
        z = require_inside(D, problem.z, "z")
        up = lempert_upper(D, w, z, budget.degree, budget.restarts, budget.seed)
        g = up.extremal.params if up.extremal is not None else None
        fams = default_families(D)
        if g is None and "geodesic" in fams:
            fams = tuple(f for f in fams if f != "geodesic")
        lo = pair_lower_bound(D, w, z, fams, geodesic=g) if fams else LowerBound(0.0)
        points = (up.sigma, up.zeta)
    elif isinstance(problem, TangentProblem):
        z = require_inside(D, problem.z, "z")
        X = point2(problem.X)
        up = kappa_upper(D, z, X, budget.degree, budget.restarts, budget.seed)
        g = up.extremal.params if up.extremal is not None else None
        fams = default_families(D)
        if g is None and "geodesic" in fams:
            fams = tuple(f for f in fams if f != "geodesic")
        lo = tangent_lower_bound(D, z, X, fams, geodesic=g) if fams else LowerBound(0.0)
        points = (0.0, 0.0)
    else:
        raise TypeError("problem must be a PairProblem or TangentProblem")
    lower = float(lo.value)
    if up.value == 0.0:
        lower = 0.0
    return SandwichCertificate(lower, up.value, lo.witness, up.disc, problem, D, budget.width,
                               lo.family, up.method, points, up.extremal)
