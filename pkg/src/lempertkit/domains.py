"""Model domains in C^2 and the symmetries of the diamond.

Exponent convention: ``Ellipsoid(q1, q2)`` is ``{|z1|^q1 + |z2|^q2 < 1}`` with
``q_j`` the exponent actually applied to ``|z_j|``.  The half-exponent notation
``E(p1/2, p2/2)`` used in the literature has ``q_j = p_j``; so the diamond is
``Ellipsoid(1, 1)`` and the ball is ``Ellipsoid(2, 2)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class OutsideDomainError(ValueError):
    pass


def point2(z: Sequence[complex]) -> np.ndarray:
    """Coerce to a finite complex 2-vector (used for both points and tangents)."""
    arr = np.asarray(z, dtype=complex).reshape(-1)
    if arr.shape != (2,):
        raise ValueError(f"expected two complex components, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("components must be finite")
    return arr


tangent2 = point2


@dataclass(frozen=True)
class DomainSpec:
    kind: str  # "disc" | "ball" | "ellipsoid" | "diamond"
    q1: float = 1.0
    q2: float = 1.0

    def __post_init__(self):
        kind = self.kind.lower()
        if kind not in ("disc", "ball", "ellipsoid", "diamond"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if kind == "ball":
            q = (2.0, 2.0)
        elif kind == "diamond":
            q = (1.0, 1.0)
        elif kind == "disc":
            q = (2.0, 2.0)
        else:
            q = (float(self.q1), float(self.q2))
            if not (q[0] >= 1.0 and q[1] >= 1.0):
                raise ValueError("only convex ellipsoids (q1, q2 >= 1) are supported")
            if q == (1.0, 1.0):
                kind = "diamond"
            elif q == (2.0, 2.0):
                kind = "ball"
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "q1", q[0])
        object.__setattr__(self, "q2", q[1])

    @property
    def exponents(self) -> tuple[float, float]:
        return (self.q1, self.q2)

    @property
    def is_disc(self) -> bool:
        return self.kind == "disc"

    def functional(self, z) -> float:
        """Defining functional; the domain is where it is < 1."""
        z1, z2 = complex(z[0]), complex(z[1])
        if self.kind == "disc":
            return abs(z1) if z2 == 0 else math.inf
        return abs(z1) ** self.q1 + abs(z2) ** self.q2

    def functional_array(self, z1, z2) -> np.ndarray:
        if self.kind == "disc":
            return np.where(np.asarray(z2) == 0, np.abs(z1), np.inf)
        return np.abs(z1) ** self.q1 + np.abs(z2) ** self.q2

    def to_dict(self) -> dict:
        return {"kind": self.kind, "q1": self.q1, "q2": self.q2}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "DomainSpec":
        return cls(d["kind"], d.get("q1", 1.0), d.get("q2", 1.0))

    @classmethod
    def from_json(cls, s: str) -> "DomainSpec":
        return cls.from_dict(json.loads(s))

    @classmethod
    def parse(cls, name: str) -> "DomainSpec":
        """Parse CLI names: ``disc``, ``ball``, ``diamond``, ``ellipsoid:2,1``."""
        name = name.strip().lower()
        if name.startswith("ellipsoid"):
            _, _, rest = name.partition(":")
            q1, q2 = (float(t) for t in rest.split(","))
            return cls("ellipsoid", q1, q2)
        if name.startswith("{"):
            return cls.from_json(name)
        return cls(name)

    def __str__(self) -> str:
        if self.kind == "ellipsoid":
            return f"ellipsoid:{self.q1:g},{self.q2:g}"
        return self.kind


DISC = DomainSpec("disc")
BALL = DomainSpec("ball")
DIAMOND = DomainSpec("diamond")


def ellipsoid(q1: float, q2: float) -> DomainSpec:
    return DomainSpec("ellipsoid", q1, q2)


def contains(D: DomainSpec, z) -> bool:
    return D.functional(z) < 1.0


def boundary_gap(D: DomainSpec, z) -> float:
    return 1.0 - D.functional(z)


def require_inside(D: DomainSpec, z, name: str = "point") -> np.ndarray:
    z = point2(z)
    if not contains(D, z):
        raise OutsideDomainError(f"{name} = {z.tolist()} is not inside {D} (defining function {D.functional(z):.6g} >= 1)")
    return z


def random_points(D: DomainSpec, n: int, rng: np.random.Generator, margin: float = 0.0) -> np.ndarray:
    """Uniform-ish samples of ``D`` with ``functional <= 1 - margin``; shape (n, 2)."""
    out = []
    while len(out) < n:
        m = max(4 * (n - len(out)), 16)
        if D.is_disc:
            z1 = rng.uniform(-1, 1, m) + 1j * rng.uniform(-1, 1, m)
            z = np.stack([z1, np.zeros(m, dtype=complex)], axis=1)
        else:
            z = rng.uniform(-1, 1, (m, 2)) + 1j * rng.uniform(-1, 1, (m, 2))
        keep = D.functional_array(z[:, 0], z[:, 1]) < 1.0 - margin
        out.extend(z[keep])
    return np.array(out[:n])


@dataclass(frozen=True)
class DiamondSymmetry:
    """``z -> (w1 * c1(z_s(1)), w2 * c2(z_s(2)))`` with optional conjugations and swap."""

    omega1: complex = 1.0
    omega2: complex = 1.0
    conj1: bool = False
    conj2: bool = False
    swap: bool = False

    def __post_init__(self):
        for w in (self.omega1, self.omega2):
            if abs(abs(complex(w)) - 1.0) > 1e-12:
                raise ValueError("rotation factors must be unimodular")
        object.__setattr__(self, "omega1", complex(self.omega1))
        object.__setattr__(self, "omega2", complex(self.omega2))

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        a, b = (z[..., 1], z[..., 0]) if self.swap else (z[..., 0], z[..., 1])
        if self.conj1:
            a = np.conj(a)
        if self.conj2:
            b = np.conj(b)
        return np.stack([self.omega1 * a, self.omega2 * b], axis=-1)

    def push_tangent(self, X) -> np.ndarray:
        """Real derivative acting on a tangent vector (the map is real-linear)."""
        return self(X)

    @property
    def is_family_member(self) -> bool:
        """Holomorphic or antiholomorphic (the rigidity theorem's forms)."""
        return self.conj1 == self.conj2

    def real_matrix(self) -> np.ndarray:
        return real_matrix_of(self)

    def to_dict(self) -> dict:
        return {
            "omega1": [self.omega1.real, self.omega1.imag],
            "omega2": [self.omega2.real, self.omega2.imag],
            "conj1": self.conj1,
            "conj2": self.conj2,
            "swap": self.swap,
        }


def diamond_symmetry(omega1=1.0, omega2=1.0, conj1=False, conj2=False, swap=False) -> DiamondSymmetry:
    return DiamondSymmetry(omega1, omega2, conj1, conj2, swap)


def to_real(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return np.stack([z[..., 0].real, z[..., 0].imag, z[..., 1].real, z[..., 1].imag], axis=-1)


def from_real(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.stack([x[..., 0] + 1j * x[..., 1], x[..., 2] + 1j * x[..., 3]], axis=-1)


def real_matrix_of(linear_map) -> np.ndarray:
    """4x4 real matrix of a real-linear map of C^2 (columns are images of the basis)."""
    cols = [to_real(linear_map(from_real(e))) for e in np.eye(4)]
    return np.stack(cols, axis=1)
