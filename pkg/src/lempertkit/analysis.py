"""Indicatrix geometry and the isometry-rigidity harness for the diamond.

Both parts are finite numerical experiments: strict convexity is probed on
sampled boundary points of the indicatrix, and rigidity is tested over a
structured candidate set of real-linear maps.  Neither is a proof.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np
from scipy.stats import qmc

from .hyperbolic import circle_sup
from .domains import (
    DIAMOND,
    DiamondSymmetry,
    DomainSpec,
    from_real,
    random_points,
    real_matrix_of,
    require_inside,
    to_real,
)
from .family import solve_tangent
from .metrics import kappa, kappa_ball, kappa_diamond, kobayashi_distance

FLAT_SEPARATION = 1e-2
FLAT_SLACK = 1e-6
# gap >= STRICT_GAP * |b1 - b2|^2; the round ball has gap = |b1 - b2|^2 / 8
STRICT_GAP = 1e-3
REJECTION_THRESHOLD = 1e-2
FAMILY_THRESHOLD = 5e-4
AXIS_MARGIN = 0.02


class Flag(str, Enum):
    FLAT = "FLAT"
    STRICT = "STRICT"
    INCONCLUSIVE = "INCONCLUSIVE"


# ---------------------------------------------------------------------------
# metric evaluation with warm starts


class KappaAt:
    """``X -> kappa_D(p; X)`` at a fixed base point.

    Ellipsoids (and the diamond off the origin) use the extremal-disc solver,
    warm-started from the previous solution, which makes sweeps over nearby
    directions cheap.
    """

    def __init__(self, D: DomainSpec, p, seed: int = 0):
        self.D = D
        self.p = require_inside(D, p, "p")
        self.seed = seed
        self._x = None
        self.evaluations = 0

    def reset(self):
        """Forget the warm start (use before jumping to a distant direction)."""
        self._x = None

    def __call__(self, X) -> float:
        self.evaluations += 1
        X = np.asarray(X, dtype=complex)
        if not np.any(X):
            return 0.0
        D = self.D
        if D.is_disc or D.kind == "ball":
            return kappa(D, self.p, X)
        if D.kind == "diamond" and not np.any(self.p):
            return kappa_diamond(self.p, X).value
        sol = solve_tangent(D.exponents, self.p, X, seed=self.seed, x0=self._x)
        if sol is None:
            return kappa(D, self.p, X, self.seed)
        self._x = sol.x
        return 1.0 / sol.scale


# ---------------------------------------------------------------------------
# indicatrix sampling


def sphere_directions(n: int) -> np.ndarray:
    """Deterministic low-discrepancy unit vectors of C^2 (Sobol points in Hopf coordinates)."""
    pts = qmc.Sobol(3, scramble=False).random(int(2 ** math.ceil(math.log2(n + 1))))[1: n + 1]
    s = np.sqrt(pts[:, 0])
    c = np.sqrt(1.0 - pts[:, 0])
    return np.stack([c * np.exp(2j * np.pi * pts[:, 1]), s * np.exp(2j * np.pi * pts[:, 2])], axis=1)


@dataclass
class IndicatrixSample:
    domain: DomainSpec
    center: np.ndarray
    directions: np.ndarray  # complex (n, 2), unit vectors
    radii: np.ndarray
    flags: list = field(default_factory=list)
    details: list = field(default_factory=list)
    warm: list = field(default_factory=list, repr=False)  # solver states, reused by classify_flatness

    @property
    def boundary_points(self) -> np.ndarray:
        return self.directions * self.radii[:, None]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x1_re", "x1_im", "x2_re", "x2_im", "radius", "flag"])
        for k, (d, r) in enumerate(zip(self.directions, self.radii)):
            flag = self.flags[k].value if k < len(self.flags) else ""
            w.writerow([repr(float(v)) for v in to_real(d)] + [repr(float(r)), flag])
        return buf.getvalue()


def sample_indicatrix(D: DomainSpec, p, n_directions: int, seed: int = 0) -> IndicatrixSample:
    """Radii ``1 / kappa_D(p; u)`` along deterministic unit directions ``u``."""
    k = KappaAt(D, p, seed)
    dirs = sphere_directions(n_directions)
    radii, warm = [], []
    R = to_real(dirs)
    for i, u in enumerate(dirs):
        # warm start from the closest direction already solved
        k._x = warm[int(np.argmin(np.linalg.norm(R[:i] - R[i], axis=1)))] if i else None
        radii.append(1.0 / k(u))
        warm.append(k._x)
    return IndicatrixSample(D, k.p, dirs, np.array(radii), warm=warm)


def _orth_complement(u_real: np.ndarray) -> np.ndarray:
    """Orthonormal basis (3, 4) of the real orthogonal complement of ``u``."""
    q, _ = np.linalg.qr(np.column_stack([u_real, np.eye(4)]))
    return q[:, 1:4].T


def _boundary(kap: Callable, x_real: np.ndarray) -> np.ndarray:
    X = from_real(x_real)
    return to_real(X / kap(X))


def classify_direction(kap: "KappaAt", u: np.ndarray, radius: float, h: float = 0.05,
                       hessian_step: float = 1e-3, warm=None) -> tuple:
    """Classify the indicatrix boundary near ``radius * u``.

    The Hessian of the metric on the real complement of ``u`` is estimated by
    finite differences; along its softest direction, pairs of boundary points
    at a few separations (all above ``FLAT_SEPARATION``) are tested: FLAT if
    some midpoint stays on the boundary, STRICT if every midpoint has the
    quadratic gap ``STRICT_GAP * d^2``, INCONCLUSIVE otherwise.
    """
    if warm is None:
        kap.reset()
    else:
        kap._x = warm
    b = to_real(u) * radius
    V = _orth_complement(to_real(u))
    step = hessian_step * radius

    def k(x):
        return kap(from_real(x))

    on_boundary = k(b)
    plus = [k(b + step * v) for v in V]
    minus = [k(b - step * v) for v in V]
    H = np.diag([(p + m - 2.0 * on_boundary) / step**2 for p, m in zip(plus, minus)])
    for i, j in itertools.combinations(range(3), 2):
        pp = k(b + step * (V[i] + V[j]))
        pm = k(b + step * (V[i] - V[j]))
        mp = k(b - step * (V[i] - V[j]))
        mm = k(b - step * (V[i] + V[j]))
        H[i, j] = H[j, i] = (pp - pm - mp + mm) / (4.0 * step**2)
    evals, evecs = np.linalg.eigh(H)
    v = evecs[:, 0] @ V
    detail = {"boundary_residual": float(on_boundary - 1.0), "hessian_min": float(evals[0]),
              "hessian_max": float(evals[-1]), "pairs": []}
    strict = True
    s = max(h * radius, 6e-3)
    while True:
        b1, b2 = _boundary(kap, b + s * v), _boundary(kap, b - s * v)
        d = float(np.linalg.norm(b1 - b2))
        if d <= FLAT_SEPARATION:
            break
        gap = 1.0 - k(0.5 * (b1 + b2))
        detail["pairs"].append({"separation": d, "midpoint_gap": float(gap)})
        if gap <= FLAT_SLACK:
            detail["pair_direction"] = ((b1 - b2) / d).tolist()
            return Flag.FLAT, detail
        strict = strict and gap >= STRICT_GAP * d**2
        s *= 0.5
    if strict and detail["pairs"]:
        return Flag.STRICT, detail
    return Flag.INCONCLUSIVE, detail


def classify_flatness(s: IndicatrixSample, seed: int = 0, min_directions: int = 1000) -> list:
    """FLAT / STRICT / INCONCLUSIVE for every sampled direction (stored on ``s``)."""
    if len(s.directions) < min_directions:
        raise ValueError(f"need at least {min_directions} directions, got {len(s.directions)}")
    kap = KappaAt(s.domain, s.center, seed)
    s.flags, s.details = [], []
    for i, (u, r) in enumerate(zip(s.directions, s.radii)):
        flag, det = classify_direction(kap, u, r, warm=s.warm[i] if i < len(s.warm) else None)
        s.flags.append(flag)
        s.details.append(det)
    return s.flags


def is_cross_face(u, tol: float = 1e-9) -> bool:
    """``u`` lies on a flat face ``{(t e1, (1 - t) e2)}`` of the diamond's boundary cone."""
    u = np.asarray(u, dtype=complex)
    return bool(abs(u[0]) > tol and abs(u[1]) > tol)


def face_direction(u) -> np.ndarray:
    """Real direction of the face segment through ``u``: ``(e1, -e2)`` with ``e_j = u_j / |u_j|``."""
    u = np.asarray(u, dtype=complex)
    d = np.array([u[0] / abs(u[0]), -u[1] / abs(u[1])])
    return to_real(d) / math.sqrt(2.0)


# ---------------------------------------------------------------------------
# candidate isometries


class CandidateKind(str, Enum):
    Symmetry = "Symmetry"
    HalfConjugation = "HalfConjugation"
    GeneralRealLinear = "GeneralRealLinear"


@dataclass
class CandidateIsometry:
    kind: CandidateKind
    symmetry: Optional[DiamondSymmetry] = None
    which: int = 2  # conjugated coordinate of a HalfConjugation
    matrix: Optional[np.ndarray] = None  # real 4x4 for GeneralRealLinear

    def __post_init__(self):
        if self.kind == CandidateKind.Symmetry and self.symmetry is None:
            raise ValueError("a Symmetry candidate needs its parameters")
        if self.kind == CandidateKind.HalfConjugation and self.which not in (1, 2):
            raise ValueError("which must be 1 or 2")
        if self.kind == CandidateKind.GeneralRealLinear:
            self.matrix = np.asarray(self.matrix, dtype=float).reshape(4, 4)

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if self.kind == CandidateKind.Symmetry:
            return self.symmetry(z)
        if self.kind == CandidateKind.HalfConjugation:
            out = z.copy()
            out[..., self.which - 1] = np.conj(z[..., self.which - 1])
            return out
        return from_real(to_real(z) @ self.matrix.T)

    def push_tangent(self, X) -> np.ndarray:
        """Real derivative applied to ``X``; every candidate is real-linear."""
        return self(X)

    def real_matrix(self) -> np.ndarray:
        return real_matrix_of(self)

    @property
    def is_family_member(self) -> bool:
        if self.kind == CandidateKind.Symmetry:
            return self.symmetry.is_family_member
        if self.kind == CandidateKind.HalfConjugation:
            return False
        return match_family(self.matrix) is not None

    def label(self) -> str:
        if self.kind == CandidateKind.Symmetry:
            s = self.symmetry
            return (f"Symmetry(omega1={s.omega1:.4f}, omega2={s.omega2:.4f}, conj1={s.conj1}, "
                    f"conj2={s.conj2}, swap={s.swap})")
        if self.kind == CandidateKind.HalfConjugation:
            return f"HalfConjugation(which={self.which})"
        return "GeneralRealLinear"

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value}
        if self.kind == CandidateKind.Symmetry:
            d["symmetry"] = self.symmetry.to_dict()
        elif self.kind == CandidateKind.HalfConjugation:
            d["which"] = self.which
        else:
            d["matrix"] = self.matrix.tolist()
        return d


def match_family(M: np.ndarray, tol: float = 1e-6) -> Optional[DiamondSymmetry]:
    """The holomorphic or antiholomorphic symmetry with real matrix ``M``, if any."""
    M = np.asarray(M, dtype=float)
    for swap in (False, True):
        for conj in (False, True):
            # read omega_j off the image of the relevant basis vector
            src = (2, 0) if swap else (0, 2)
            om = []
            for j in range(2):
                col = M[:, src[j]]
                om.append(complex(col[2 * j], col[2 * j + 1]))
            if any(abs(abs(o) - 1.0) > tol for o in om):
                continue
            S = DiamondSymmetry(om[0] / abs(om[0]), om[1] / abs(om[1]), conj, conj, swap)
            if np.max(np.abs(real_matrix_of(S) - M)) < tol:
                return S
    return None


def symmetry_classes() -> list:
    """The eight discrete classes (conj1, conj2, swap)."""
    return [dict(conj1=c1, conj2=c2, swap=sw) for c1, c2, sw in itertools.product((False, True), repeat=3)]


FAMILY_ROTATIONS = ((0.0, 0.0), (2.1, -0.7))


def family_candidates(rotations=FAMILY_ROTATIONS) -> list:
    """Family members: both conjugation flags equal, rotation angles from ``rotations``."""
    out = []
    for cls in symmetry_classes():
        if cls["conj1"] != cls["conj2"]:
            continue
        for a1, a2 in rotations:
            S = DiamondSymmetry(np.exp(1j * a1), np.exp(1j * a2), **cls)
            out.append(CandidateIsometry(CandidateKind.Symmetry, symmetry=S))
    return out


def non_family_symmetries() -> list:
    """Classes with exactly one conjugation (including both half-conjugations)."""
    out = []
    for cls in symmetry_classes():
        if cls["conj1"] == cls["conj2"]:
            continue
        S = DiamondSymmetry(1.0, 1.0, **cls)
        out.append(CandidateIsometry(CandidateKind.Symmetry, symmetry=S))
    return out


def linear_image_norm(M: np.ndarray) -> float:
    """``sup |F1| + |F2|`` of the real-linear map ``M`` over the closed diamond.

    The closed diamond is the convex hull of the two axis circles and the
    target functional is convex, so the sup is attained on those circles.
    """
    M = np.asarray(M, dtype=float)
    best = 0.0
    for axis in (0, 1):
        def on_circle(t, axis=axis):
            z = np.zeros(2, dtype=complex)
            z[axis] = complex(math.cos(t), math.sin(t))
            w = from_real(M @ to_real(z))
            return float(abs(w[0]) + abs(w[1]))

        best = max(best, circle_sup(on_circle, n_grid=360)[1])
    return best


def admissible_real_linear(M: np.ndarray) -> bool:
    """``M`` maps the diamond into itself."""
    return linear_image_norm(M) <= 1.0 + 1e-12


def random_admissible_linear(rng: np.random.Generator) -> np.ndarray:
    """A random real-linear map of C^2 scaled to map the diamond into itself."""
    M = rng.normal(size=(4, 4))
    return M / linear_image_norm(M) * rng.uniform(0.8, 1.0 - 1e-6)


def sample_admissible(F: CandidateIsometry, n: int = 10_000, seed: int = 0) -> bool:
    pts = random_points(DIAMOND, n, np.random.default_rng(seed))
    img = F(pts)
    return bool(np.all(np.abs(img[:, 0]) + np.abs(img[:, 1]) < 1.0))


# ---------------------------------------------------------------------------
# indicatrix image and distance defects


def indicatrix_image_check(F: CandidateIsometry, D: DomainSpec, G: DomainSpec, w, n: int = 64, seed: int = 0) -> float:
    """``max |kappa_G(F(w); dF X) - 1|`` over ``n`` boundary points ``X`` of ``I_D(w)``."""
    w = require_inside(D, w, "w")
    kD = KappaAt(D, w, seed)
    kG = KappaAt(G, F(w), seed)
    worst = 0.0
    for u in sphere_directions(n):
        X = u / kD(u)
        worst = max(worst, abs(kG(F.push_tangent(X)) - 1.0))
    return worst


def off_axis_pairs(n: int, seed: int, margin: float = 0.05, axis_margin: float = AXIS_MARGIN) -> list:
    """Random pairs in the diamond with both coordinates of both points at least ``axis_margin``."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        P = random_points(DIAMOND, 2 * (n - len(out)) + 8, rng, margin)
        P = P[(np.abs(P[:, 0]) >= axis_margin) & (np.abs(P[:, 1]) >= axis_margin)]
        for k in range(0, len(P) - 1, 2):
            if len(out) < n:
                out.append((P[k], P[k + 1]))
    return out


def axis_pairs(n: int, seed: int) -> list:
    """Pairs ``((t, 0), (0, s))`` with random phases."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        t, s = rng.uniform(0.05, 0.9, 2)
        a, b = np.exp(1j * rng.uniform(-np.pi, np.pi, 2))
        out.append((np.array([t * a, 0j]), np.array([0j, s * b])))
    return out


@dataclass
class DefectReport:
    defect: float
    witness: Optional[tuple]
    certified_pairs: int
    skipped_pairs: int
    evaluated_pairs: int

    @property
    def sufficiently_certified(self) -> bool:
        return self.skipped_pairs <= 0.1 * max(self.evaluated_pairs, 1)

    def to_dict(self) -> dict:
        w = None
        if self.witness is not None:
            w = [[[complex(c).real, complex(c).imag] for c in p] for p in self.witness]
        return {"defect": self.defect, "witness": w, "certified_pairs": self.certified_pairs,
                "skipped_pairs": self.skipped_pairs, "evaluated_pairs": self.evaluated_pairs,
                "sufficiently_certified": self.sufficiently_certified}


class DistanceCache:
    """Certified diamond distances of the reference pairs, computed once."""

    def __init__(self, budget=None):
        self.budget = budget
        self._store = {}

    def __call__(self, w, z):
        key = (tuple(np.round(w, 15)), tuple(np.round(z, 15)))
        if key not in self._store:
            r = kobayashi_distance(DIAMOND, w, z, self.budget)
            self._store[key] = (r.value, r.certified)
        return self._store[key]


def isometry_defect(F: CandidateIsometry, pair_budget: int = 500, seed: int = 0, pairs=None,
                    cache: Optional[DistanceCache] = None, stop_above: Optional[float] = None,
                    budget=None) -> DefectReport:
    """Max ``|k(F(w), F(z)) - k(w, z)|`` over certified pairs.

    Pairs whose sandwich does not certify on either side are skipped and
    counted.  ``stop_above`` ends the sweep at the first pair exceeding it.
    """
    pairs = pairs if pairs is not None else off_axis_pairs(pair_budget, seed)
    cache = cache or DistanceCache(budget)
    worst, witness, ok, skipped, seen = 0.0, None, 0, 0, 0
    for w, z in pairs:
        seen += 1
        k0, c0 = cache(w, z)
        r1 = kobayashi_distance(DIAMOND, F(w), F(z), budget)
        if not (c0 and r1.certified):
            skipped += 1
            continue
        ok += 1
        d = abs(r1.value - k0)
        if d > worst:
            worst, witness = d, (w, z)
        if stop_above is not None and worst > stop_above:
            break
    return DefectReport(worst, witness, ok, skipped, seen)


# ---------------------------------------------------------------------------
# proof-step experiments


def step_experiments(F: CandidateIsometry, n: int = 200, seed: int = 0, tol: float = 1e-9) -> dict:
    """Numerical analogues of the rigidity proof steps for one candidate.

    ``origin``: F fixes 0.  ``axes``: the union of the axes maps onto itself,
    each axis onto an axis.  ``moduli``: ``(|F1|, |F2|)`` equals ``(|z1|, |z2|)``
    up to the swap.  ``rays``: ``F(t z) = t F(z)`` for real ``t``.
    """
    rng = np.random.default_rng(seed)
    P = random_points(DIAMOND, n, rng)
    img = F(P)
    steps = {}
    steps["origin"] = bool(np.max(np.abs(F(np.zeros(2, dtype=complex)))) < tol)
    t = rng.uniform(-0.95, 0.95, n) * np.exp(1j * rng.uniform(-np.pi, np.pi, n))
    ax1 = F(np.stack([t, np.zeros(n)], 1))
    ax2 = F(np.stack([np.zeros(n), t], 1))

    def on_axis(Z):
        return bool(np.all(np.abs(Z[:, 0]) < tol) or np.all(np.abs(Z[:, 1]) < tol))

    steps["axes"] = on_axis(ax1) and on_axis(ax2)
    mod = np.abs(img)
    straight = np.max(np.abs(mod - np.abs(P)))
    swapped = np.max(np.abs(mod - np.abs(P[:, ::-1])))
    steps["moduli"] = bool(min(straight, swapped) < tol)
    s = rng.uniform(-1.0, 1.0, n)
    steps["rays"] = bool(np.max(np.abs(F(P * s[:, None]) - img * s[:, None])) < tol)
    return steps


def rigidity_report(pair_budget: int = 500, seed: int = 7, n_random: int = 1000, rotations=FAMILY_ROTATIONS,
                    budget=None, progress: Optional[Callable[[str], None]] = None) -> dict:
    """Run the candidate sweep; returns a JSON-ready report.

    The sweep covers family members on a rotation grid, the four one-sided
    conjugation classes, and ``n_random`` random admissible real-linear maps.
    It is property-based acceptance over this finite candidate set and not a
    proof of the rigidity theorem.
    """
    say = progress or (lambda msg: None)
    pairs = off_axis_pairs(pair_budget, seed)
    cache = DistanceCache(budget)
    report = {"statement": "finite candidate sweep; not a proof for all C^1 maps",
              "rejection_threshold": REJECTION_THRESHOLD, "family_threshold": FAMILY_THRESHOLD,
              "pairs": pair_budget, "seed": seed, "candidates": []}

    def entry(F, defect: DefectReport, expect_family: bool):
        passed = defect.defect < FAMILY_THRESHOLD if expect_family else defect.defect > REJECTION_THRESHOLD
        witness_off_axis = None
        if defect.witness is not None:
            witness_off_axis = bool(all(np.min(np.abs(p)) >= AXIS_MARGIN for p in defect.witness))
        return {"candidate": F.label(), "family_member": expect_family, "defect": defect.to_dict(),
                "witness_off_axis": witness_off_axis, "steps": step_experiments(F, seed=seed), "pass": passed}

    for F in family_candidates(rotations):
        d = isometry_defect(F, pairs=pairs, cache=cache, budget=budget)
        report["candidates"].append(entry(F, d, True))
        say(f"family {F.label()}: defect {d.defect:.2e}")
    hcs = [CandidateIsometry(CandidateKind.HalfConjugation, which=j) for j in (1, 2)]
    for F in hcs + non_family_symmetries():
        d = isometry_defect(F, pairs=pairs, cache=cache, stop_above=REJECTION_THRESHOLD, budget=budget)
        report["candidates"].append(entry(F, d, False))
        say(f"non-family {F.label()}: defect {d.defect:.2e}")
    rng = np.random.default_rng([seed, 1])
    n_done = 0
    for _ in range(n_random):
        M = random_admissible_linear(rng)
        F = CandidateIsometry(CandidateKind.GeneralRealLinear, matrix=M)
        fam = F.is_family_member
        d = isometry_defect(F, pairs=pairs, cache=cache, stop_above=None if fam else REJECTION_THRESHOLD,
                            budget=budget)
        e = entry(F, d, fam)
        e["admissible"] = admissible_real_linear(M)
        report["candidates"].append(e)
        n_done += 1
        if n_done % 100 == 0:
            say(f"random linear maps: {n_done}/{n_random}")
    report["all_pass"] = all(c["pass"] for c in report["candidates"])
    return report
