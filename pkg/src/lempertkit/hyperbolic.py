"""Poincaré disc primitives.

The distance is normalised as ``artanh`` of the Möbius quotient (no factor
1/2), so the matching infinitesimal metric is ``|v| / (1 - |a|^2)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class OutsideDiscError(ValueError):
    pass


def unit_disc_point(value) -> complex:
    """Validate a point of the open unit disc and return it as ``complex``."""
    v = complex(value)
    if not (cmath.isfinite(v) and abs(v) < 1.0):
        raise OutsideDiscError(f"{v!r} is not in the open unit disc")
    return v


def mobius_quotient(a: complex, b: complex) -> float:
    return abs((a - b) / (1.0 - b.conjugate() * a))


def poincare_distance(a, b) -> float:
    a = unit_disc_point(a)
    b = unit_disc_point(b)
    if a == b:
        return 0.0
    return math.atanh(min(mobius_quotient(a, b), 1.0 - 1e-17))


def poincare_metric(a, v) -> float:
    a = unit_disc_point(a)
    return abs(complex(v)) / (1.0 - abs(a) ** 2)


def poincare_distance_array(a, b) -> np.ndarray:
    """Vectorised distance without validation (callers guarantee |a|,|b| < 1)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    q = np.abs((a - b) / (1.0 - np.conj(b) * a))
    return np.arctanh(np.minimum(q, 1.0 - 1e-17))


@dataclass(frozen=True)
class DiscAutomorphism:
    """The map ``lam -> rotation * (lam - center) / (1 - conj(center) * lam)``."""

    rotation: complex = 1.0 + 0.0j
    center: complex = 0.0j

    def __post_init__(self):
        if abs(abs(complex(self.rotation)) - 1.0) > 1e-12:
            raise ValueError("rotation must be unimodular")
        if not abs(complex(self.center)) < 1.0:
            raise ValueError("center must lie in the open unit disc")
        object.__setattr__(self, "rotation", complex(self.rotation))
        object.__setattr__(self, "center", complex(self.center))

    def __call__(self, lam):
        c = self.center
        return self.rotation * (lam - c) / (1.0 - np.conj(c) * lam)

    def derivative(self, lam):
        c = self.center
        return self.rotation * (1.0 - abs(c) ** 2) / (1.0 - np.conj(c) * lam) ** 2

    def inverse(self) -> "DiscAutomorphism":
        # mu = rot (lam - c)/(1 - c̄ lam)  =>  lam = (mu/rot + c)/(1 + c̄ mu/rot)
        rot = self.rotation
        return DiscAutomorphism(rotation=1.0 / rot, center=-self.center * rot)

    def compose(self, other: "DiscAutomorphism") -> "DiscAutomorphism":
        """Return ``self ∘ other``."""
        center = complex(other.inverse()(self.inverse()(0.0)))
        # the derivative at the zero has the phase of the rotation
        d = self.derivative(other(center)) * other.derivative(center)
        return DiscAutomorphism(d / abs(d), center)

    @classmethod
    def from_three_points(cls, src: Iterable[complex], dst: Iterable[complex]) -> "DiscAutomorphism":
        """Fit the automorphism sending three points ``src`` to ``dst``.

        A general fractional linear map is solved for in the least-squares sense
        and then projected onto the automorphism group; the caller verifies the
        fit on further samples.
        """
        src = [complex(s) for s in src]
        dst = [complex(d) for d in dst]
        # (a s + b) - d (c s + 1) = 0, unknowns a, b, c
        A = np.array([[s, 1.0, -d * s] for s, d in zip(src, dst)], dtype=complex)
        rhs = np.array(dst, dtype=complex)
        a, b, c = np.linalg.lstsq(A, rhs, rcond=None)[0]
        center = -b / a if a != 0 else 0.0
        if not abs(center) < 1.0:
            raise ValueError("interpolating map is not a disc automorphism")
        rot = a / abs(a) if a != 0 else 1.0
        return cls(rot, center)


def schwarz_pick_check(h: Callable[[complex], complex], pairs, slack: float = 1e-9) -> bool:
    """True iff ``p(h(a), h(b)) <= p(a, b) + slack`` for every supplied pair."""
    for a, b in pairs:
        if poincare_distance(h(a), h(b)) > poincare_distance(a, b) + slack:
            return False
    return True


def golden_section_max(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-10):
    """Maximise a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def circle_sup(f: Callable[[float], float], n_grid: int = 720, tol: float = 1e-10):
    """Supremum of a smooth function of an angle: coarse grid, then golden section.

    Returns ``(theta, value)``.
    """
    thetas = np.linspace(0.0, 2.0 * np.pi, n_grid, endpoint=False)
    values = np.array([f(t) for t in thetas])
    k = int(np.argmax(values))
    step = 2.0 * np.pi / n_grid
    theta, value = golden_section_max(f, thetas[k] - step, thetas[k] + step, tol)
    if value < values[k]:
        return float(thetas[k]), float(values[k])
    return float(theta % (2.0 * np.pi)), float(value)
