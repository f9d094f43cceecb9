"""Extremal discs of the convex ellipsoids ``{|z1|^q1 + |z2|^q2 < 1}``, ``q_j in {1, 2}``.

Every complex geodesic has components

    f_j(lam) = a_j * B_j(lam)**r_j * ((1 - conj(alpha_j) lam) / (1 - conj(alpha0) lam))**(2/q_j)

with ``B_j`` the Möbius factor vanishing at ``alpha_j``.  On the unit circle
``sum |f_j|^q_j`` equals

    sum_j m_j |1 - conj(alpha_j) zeta|^2 / |1 - conj(alpha0) zeta|^2,   m_j = |a_j|^q_j,

which is identically 1 exactly when

    alpha0 = sum m_j alpha_j   and   1 + |alpha0|^2 = sum m_j (1 + |alpha_j|^2).

``GeodesicParams.from_shape`` solves the second relation for the overall scale
of ``m``, so every parameter vector handed to the solver describes a disc whose
boundary lies in the boundary of the domain.

For such a disc the map ``h_j = zeta * rho * conj(nu_j(f(zeta)))`` (``nu`` the
gradient of the defining function, ``rho = |1 - conj(alpha0) zeta|^2``)
extends holomorphically, and for ``z`` in the domain

    Psi_z(lam) = sum_j (z_j - f_j(lam)) h_j(lam)

winds once around the origin on the circle.  Its unique zero in the disc is a
holomorphic function of ``z`` mapping the domain into the disc and inverting
``f``: ``GeodesicLeftInverse`` evaluates it as a polynomial root.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.optimize import least_squares

SUPPORTED_EXPONENTS = (1.0, 2.0)


def check_exponents(q) -> tuple[float, float]:
    q = (float(q[0]), float(q[1]))
    if q[0] not in SUPPORTED_EXPONENTS or q[1] not in SUPPORTED_EXPONENTS:
        raise ValueError(f"extremal discs are implemented for exponents 1 and 2 only, got {q}")
    return q


def _ppow(p, k: int):
    out = np.array([1.0 + 0j])
    for _ in range(k):
        out = P.polymul(out, p)
    return out


@dataclass(frozen=True)
class GeodesicParams:
    a1: complex
    a2: complex
    alpha1: complex
    alpha2: complex
    r1: int
    r2: int
    alpha0: complex
    q1: float = 1.0
    q2: float = 1.0
    _polys: tuple = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("a1", "a2", "alpha1", "alpha2", "alpha0"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        object.__setattr__(self, "r1", int(self.r1))
        object.__setattr__(self, "r2", int(self.r2))
        q = check_exponents((self.q1, self.q2))
        object.__setattr__(self, "q1", q[0])
        object.__setattr__(self, "q2", q[1])
        if self.r1 not in (0, 1) or self.r2 not in (0, 1):
            raise ValueError("r_j must be 0 or 1")
        for j, (al, r) in enumerate(zip(self.alpha, self.r), start=1):
            if r == 1 and not abs(al) < 1.0:
                raise ValueError(f"alpha{j} must lie in the open disc when r{j} = 1")
            if abs(al) > 1.0 + 1e-12:
                raise ValueError(f"alpha{j} must lie in the closed disc")
        if not abs(self.alpha0) < 1.0:
            raise ValueError("alpha0 must lie in the open disc")
        object.__setattr__(self, "_polys", self._numerators())

    # -- structure -------------------------------------------------------
    @property
    def a(self):
        return (self.a1, self.a2)

    @property
    def alpha(self):
        return (self.alpha1, self.alpha2)

    @property
    def r(self):
        return (self.r1, self.r2)

    @property
    def q(self):
        return (self.q1, self.q2)

    @property
    def e(self):
        return tuple(int(round(2.0 / qj)) for qj in self.q)

    @property
    def zero_set(self) -> frozenset:
        return frozenset(j for j in (1, 2) if self.r[j - 1] == 1)

    def relation_residual(self) -> float:
        m = [abs(a) ** q for a, q in zip(self.a, self.q)]
        r1 = abs(self.alpha0 - sum(mj * al for mj, al in zip(m, self.alpha)))
        r2 = abs(1 + abs(self.alpha0) ** 2 - sum(mj * (1 + abs(al) ** 2) for mj, al in zip(m, self.alpha)))
        return max(r1, r2)

    def component_zero_free(self, j: int, tol: float = 1e-9) -> bool:
        """True iff ``f_j`` has no zero in the open disc (component index 1 or 2)."""
        a, al, r = self.a[j - 1], self.alpha[j - 1], self.r[j - 1]
        if abs(a) < tol:
            return False
        return r == 0 or abs(al) >= 1.0 - tol

    # -- evaluation ------------------------------------------------------
    def _numerators(self):
        d0 = np.array([1.0, -self.alpha0.conjugate()])
        nums = []
        for a, al, r, e in zip(self.a, self.alpha, self.r, self.e):
            pj = P.polymul(_ppow([-al, 1.0], r), _ppow([1.0, -al.conjugate()], e - r))
            nums.append(a * P.polymul(pj, _ppow(d0, 2 - e)))
        return tuple(nums), d0

    def __call__(self, lam) -> np.ndarray:
        (n1, n2), d0 = self._polys
        lam = np.asarray(lam, dtype=complex)
        den = P.polyval(lam, d0) ** 2
        return np.stack([P.polyval(lam, n1) / den, P.polyval(lam, n2) / den], axis=-1)

    def derivative(self, lam) -> np.ndarray:
        (n1, n2), d0 = self._polys
        lam = np.asarray(lam, dtype=complex)
        dd = P.polyval(lam, d0)
        out = []
        for n in (n1, n2):
            out.append((P.polyval(lam, P.polyder(n)) * dd + 2 * self.alpha0.conjugate() * P.polyval(lam, n)) / dd**3)
        return np.stack(out, axis=-1)

    def boundary_functional(self, radius: float = 1.0, n: int = 256) -> np.ndarray:
        lam = radius * np.exp(2j * np.pi * np.arange(n) / n)
        f = self(lam)
        return np.abs(f[:, 0]) ** self.q1 + np.abs(f[:, 1]) ** self.q2

    def maps_into_domain(self, n: int = 256, radius: float = 0.999) -> bool:
        return bool(np.all(self.boundary_functional(radius, n) < 1.0))

    # -- construction ----------------------------------------------------
    @classmethod
    def from_shape(cls, psi, theta1, theta2, alpha1, alpha2, r=(1, 1), q=(1.0, 1.0)) -> "GeodesicParams":
        """Parameters from weight angle ``psi``, phases and zeros, normalised so
        the boundary of the disc lies in the boundary of the domain."""
        q = check_exponents(q)
        mu = (math.cos(psi) ** 2, math.sin(psi) ** 2)
        al = (complex(alpha1), complex(alpha2))
        gamma = mu[0] * (1 + abs(al[0]) ** 2) + mu[1] * (1 + abs(al[1]) ** 2)
        beta = mu[0] * al[0] + mu[1] * al[1]
        disc = max(gamma * gamma - 4 * abs(beta) ** 2, 0.0)
        s = 2.0 / (gamma + math.sqrt(disc))
        m = (s * mu[0], s * mu[1])
        a = tuple(mj ** (1.0 / qj) * cmath.exp(1j * th) for mj, qj, th in zip(m, q, (theta1, theta2)))
        return cls(a[0], a[1], al[0], al[1], r[0], r[1], s * beta, q[0], q[1])

    def to_dict(self) -> dict:
        c = lambda v: [v.real, v.imag]  # noqa: E731
        return {
            "a": [c(self.a1), c(self.a2)],
            "alpha": [c(self.alpha1), c(self.alpha2)],
            "r": [self.r1, self.r2],
            "alpha0": c(self.alpha0),
            "q": [self.q1, self.q2],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GeodesicParams":
        c = lambda v: complex(v[0], v[1])  # noqa: E731
        q = d.get("q", [1.0, 1.0])
        return cls(c(d["a"][0]), c(d["a"][1]), c(d["alpha"][0]), c(d["alpha"][1]),
                   d["r"][0], d["r"][1], c(d["alpha0"]), q[0], q[1])


class GeodesicLeftInverse:
    """Holomorphic retraction of the domain onto a geodesic (see module docstring).

    ``phases`` fills in the free unimodular direction of a vanishing component
    on the diamond's axes (any value of modulus <= 1 gives a valid map).
    """

    def __init__(self, params: GeodesicParams, phases: Sequence[complex] = (1.0, 1.0)):
        self.params = params
        self.phases = tuple(complex(p) for p in phases)
        d0 = np.array([1.0, -params.alpha0.conjugate()])
        hnum, hden, fnum = [], [], []
        for j in range(2):
            a, al, r, q, e = params.a[j], params.alpha[j], params.r[j], params.q[j], params.e[j]
            pj = P.polymul(_ppow([-al, 1.0], r), _ppow([1.0, -al.conjugate()], e - r))
            fnum.append((a * pj, e))
            if q == 1.0:
                u = a.conjugate() / abs(a) if abs(a) > 0 else self.phases[j]
                if r == 1:
                    hnum.append(0.5 * u * _ppow(d0, 2))
                    hden.append(np.array([1.0 + 0j]))
                else:
                    hnum.append(0.5 * u * P.polymul([-al, 1.0], _ppow(d0, 2)))
                    hden.append(np.array([1.0, -al.conjugate()]))
            else:
                base = P.polymul(_ppow([-al, 1.0], 1 - r), _ppow([1.0, -al.conjugate()], r))
                hnum.append(a.conjugate() * P.polymul(base, d0))
                hden.append(np.array([1.0 + 0j]))
        d2 = _ppow(d0, 2)
        self.K = []
        L = np.zeros(1, dtype=complex)
        for j in range(2):
            other = hden[1 - j]
            self.K.append(P.polymul(P.polymul(hnum[j], d2), other))
            num, e = fnum[j]
            L = P.polyadd(L, P.polymul(P.polymul(P.polymul(num, hnum[j]), _ppow(d0, 2 - e)), other))
        self.L = L

    def _poly(self, z):
        return P.polysub(P.polyadd(z[0] * self.K[0], z[1] * self.K[1]), self.L)

    def __call__(self, z) -> complex:
        Q = self._poly(z)
        scale = np.max(np.abs(Q))
        k = len(Q)
        while k > 1 and abs(Q[k - 1]) <= 1e-14 * scale:
            k -= 1
        roots = P.polyroots(Q[:k]) if k > 1 else np.array([])
        inside = roots[np.abs(roots) < 1.0]
        if len(inside) == 0:
            if len(roots) == 0:
                return 0j
            lam = roots[np.argmin(np.abs(roots))]
            return complex(lam / abs(lam) * (1 - 1e-16))
        if len(inside) > 1:
            inside = inside[np.argsort(np.abs(P.polyval(inside, Q)))]
        return complex(inside[0])

    def derivative(self, z, X) -> complex:
        lam = self(z)
        Q = self._poly(z)
        dQ = P.polyval(lam, P.polyder(Q))
        return complex(-(X[0] * P.polyval(lam, self.K[0]) + X[1] * P.polyval(lam, self.K[1])) / dQ)

    def to_dict(self) -> dict:
        return {"variant": "GeodesicLeftInverse", "params": self.params.to_dict(),
                "phases": [[p.real, p.imag] for p in self.phases]}


# ---------------------------------------------------------------------------
# extremal-disc solver


def _shape_to_raw(x, q):
    """Map solver coordinates to ``(a, alpha, alpha0)`` without validation."""
    b1 = complex(x[3], x[4])
    b2 = complex(x[5], x[6])
    al = (b1 / math.sqrt(1.0 + abs(b1) ** 2), b2 / math.sqrt(1.0 + abs(b2) ** 2))
    c, s_ = math.cos(x[0]), math.sin(x[0])
    mu = (c * c, s_ * s_)
    gamma = mu[0] * (1 + abs(al[0]) ** 2) + mu[1] * (1 + abs(al[1]) ** 2)
    beta = mu[0] * al[0] + mu[1] * al[1]
    s = 2.0 / (gamma + math.sqrt(max(gamma * gamma - 4 * abs(beta) ** 2, 0.0)))
    a = (
        (s * mu[0]) ** (1.0 / q[0]) * cmath.exp(1j * x[1]),
        (s * mu[1]) ** (1.0 / q[1]) * cmath.exp(1j * x[2]),
    )
    return a, al, s * beta


def _unpack(x, r, q) -> GeodesicParams:
    a, al, _ = _shape_to_raw(x, q)
    return GeodesicParams.from_shape(x[0], x[1], x[2], al[0], al[1], r, q)


def _raw_value_slope0(a, al, a0, r, e):
    vals, slopes = [], []
    a0c = a0.conjugate()
    for j in range(2):
        A0 = -al[j] if r[j] == 1 else 1.0
        dA = 1.0 if r[j] == 1 else 0.0
        vals.append(a[j] * A0)
        slopes.append(a[j] * (dA + A0 * (-(e[j] - r[j]) * al[j].conjugate() + e[j] * a0c)))
    return vals, slopes


def _raw_value(a, al, a0, r, e, lam):
    d0 = 1.0 - a0.conjugate() * lam
    out = []
    for j in range(2):
        v = a[j] * (1.0 - al[j].conjugate() * lam) ** (e[j] - r[j]) / d0 ** e[j]
        if r[j] == 1:
            v *= lam - al[j]
        out.append(v)
    return out


def _sigmoid(u):
    if u >= 0:
        return 1.0 / (1.0 + math.exp(-u))
    eu = math.exp(u)
    return eu / (1.0 + eu)


@dataclass
class ExtremalDisc:
    """A solved extremal disc: ``f(sigma) = w, f(zeta) = z`` (pair problem) or
    ``f(0) = z, f'(0) = scale * X`` (tangent problem)."""

    params: GeodesicParams
    zeta: Optional[float] = None
    sigma: Optional[float] = None
    scale: Optional[float] = None
    residual: float = 0.0
    x: Optional[np.ndarray] = None


CHARTS = ((1, 1), (1, 0), (0, 1), (0, 0))


def _start(rng: np.random.Generator, r, q, base, guess: float) -> np.ndarray:
    """Random start; half of them place ``f(0)`` near ``base`` for chart ``r``."""
    x = np.empty(8)
    x[7] = guess + rng.normal(0.0, 0.7)
    if base is not None and rng.uniform() < 0.5:
        al = [0j, 0j]
        a = [0j, 0j]
        for j in range(2):
            if r[j] == 1:
                al[j] = 0.95 * rng.uniform() ** 0.5 * cmath.exp(1j * rng.uniform(-math.pi, math.pi))
                a[j] = -base[j] / al[j]
            else:
                al[j] = rng.uniform() ** 0.5 * cmath.exp(1j * rng.uniform(-math.pi, math.pi))
                a[j] = base[j]
        m = [max(abs(a[j]), 1e-3) ** q[j] for j in range(2)]
        x[0] = math.atan2(math.sqrt(m[1]), math.sqrt(m[0]))
        x[1:3] = [cmath.phase(a[0]) if a[0] != 0 else 0.0, cmath.phase(a[1]) if a[1] != 0 else 0.0]
        for j in range(2):
            al_j = al[j] * min(1.0, 0.97 / max(abs(al[j]), 1e-12))
            b = al_j / math.sqrt(1.0 - abs(al_j) ** 2)
            x[3 + 2 * j], x[4 + 2 * j] = b.real, b.imag
        return x
    x[0] = rng.uniform(0.05, math.pi / 2 - 0.05)
    x[1:3] = rng.uniform(-math.pi, math.pi, 2)
    x[3:7] = rng.normal(0.0, 0.8, 4)
    return x


def _solve(residual, r, q, x0_iter, tol, method="lm"):
    best = None
    for x0 in x0_iter:
        try:
            # degenerate trust-region steps are rejected by the residual check below
            with np.errstate(all="ignore"):
                sol = _least_squares(residual, x0, method, tol)
        except (ValueError, ZeroDivisionError, OverflowError):
            continue
        res = float(np.max(np.abs(sol.fun)))
        if not math.isfinite(res):
            continue
        if best is None or res < best[0]:
            best = (res, sol.x)
        if res < tol:
            break
    return best


def _least_squares(residual, x0, method, tol):
    sol = least_squares(residual, x0, method=method, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=400)
    res = float(np.max(np.abs(sol.fun)))
    if method == "lm" and res < 1e-6 and not res < tol:
        # MINPACK's relative difference step breaks down for coordinates
        # converging to zero; finish with absolute steps
        sol = least_squares(residual, sol.x, method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=100)
    return sol


def solve_pair(q, w, z, seed: int = 0, starts_per_chart: int = 16, tol: float = 1e-11,
               x0: Optional[np.ndarray] = None, charts=CHARTS) -> Optional[ExtremalDisc]:
    """Find a disc of the family with ``f(-s) = w`` and ``f(s) = z``, ``0 < s < 1``.

    The symmetric placement keeps the pole of the disc away from the unit
    circle for far-apart points.  Returns ``None`` when no chart converges
    below ``tol``.
    """
    q = check_exponents(q)
    e = tuple(int(round(2.0 / qj)) for qj in q)
    w = (complex(w[0]), complex(w[1]))
    z = (complex(z[0]), complex(z[1]))
    scale = max(abs(w[0] - z[0]) + abs(w[1] - z[1]), 1e-300)
    guess = math.log(0.5 * scale) + 0.5
    mid = (0.5 * (w[0] + z[0]), 0.5 * (w[1] + z[1]))

    def make_residual(r):
        def residual(x):
            a, al, a0 = _shape_to_raw(x, q)
            s = _sigmoid(x[7])
            v0 = _raw_value(a, al, a0, r, e, -s)
            v1 = _raw_value(a, al, a0, r, e, s)
            d = [(v0[0] - w[0]) / scale, (v0[1] - w[1]) / scale, (v1[0] - z[0]) / scale, (v1[1] - z[1]) / scale]
            return [c.real for c in d] + [c.imag for c in d]
        return residual

    sol = _run_charts(make_residual, q, seed, starts_per_chart, tol, x0, charts, guess, pair=True, base=mid)
    if sol is not None:
        sol.sigma = -sol.zeta
    return sol


def solve_tangent(q, z, X, seed: int = 0, starts_per_chart: int = 16, tol: float = 1e-11,
                  x0: Optional[np.ndarray] = None, charts=CHARTS) -> Optional[ExtremalDisc]:
    """Find a disc of the family with ``f(0) = z`` and ``f'(0) = t X``, ``t > 0``.

    ``1 / t`` is then the Kobayashi–Royden length of ``X`` at ``z``.
    """
    q = check_exponents(q)
    e = tuple(int(round(2.0 / qj)) for qj in q)
    z = (complex(z[0]), complex(z[1]))
    X = (complex(X[0]), complex(X[1]))
    nx = math.hypot(abs(X[0]), abs(X[1]))
    Xn = (X[0] / nx, X[1] / nx)

    def make_residual(r):
        def residual(x):
            a, al, a0 = _shape_to_raw(x, q)
            v0, s0 = _raw_value_slope0(a, al, a0, r, e)
            t = math.exp(min(x[7], 50.0))
            d = [v0[0] - z[0], v0[1] - z[1], s0[0] - t * Xn[0], s0[1] - t * Xn[1]]
            return [c.real for c in d] + [c.imag for c in d]
        return residual

    sol = _run_charts(make_residual, q, seed, starts_per_chart, tol, x0, charts, 0.0, pair=False, base=z)
    if sol is not None:
        sol.scale = sol.scale / nx
    return sol


def _run_charts(make_residual, q, seed, starts_per_chart, tol, x0, charts, guess, pair, base=None):
    rng = np.random.default_rng(seed)
    best = None
    chart_list = list(charts)
    if x0 is not None:
        r0 = (int(x0[8]), int(x0[9])) if len(x0) > 8 else chart_list[0]
        found = _solve(make_residual(r0), r0, q, [np.asarray(x0[:8], dtype=float)], tol)
        if found is not None:
            best = (found[0], found[1], r0)
            if found[0] < tol:
                return _finish(best, q, pair)
    # Levenberg–Marquardt first (fast); trust-region reflective as a slower
    # second pass, which copes better with nearly degenerate discs
    for method, rounds in (("lm", starts_per_chart), ("trf", max(starts_per_chart // 2, 1))):
        for _round in range(rounds):
            for r in chart_list:
                found = _solve(make_residual(r), r, q, [_start(rng, r, q, base, guess)], tol, method)
                if found is not None and (best is None or found[0] < best[0]):
                    best = (found[0], found[1], r)
                if best is not None and best[0] < tol:
                    return _finish(best, q, pair)
    return None


def _finish(best, q, pair) -> ExtremalDisc:
    res, x, r = best
    g = _unpack(x, r, q)
    xx = np.concatenate([x, [r[0], r[1]]])
    if pair:
        return ExtremalDisc(g, zeta=_sigmoid(x[7]), residual=res, x=xx)
    return ExtremalDisc(g, scale=math.exp(min(x[7], 50.0)), residual=res, x=xx)
