"""Verification suites: each check compares a computed quantity with an
independent reference at a fixed tolerance and records the measured value.

Random problems use boundary margins because the certified sandwich width
grows like ``1e-6 / gap^2`` as points approach the boundary.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import analysis
from .domains import BALL, DIAMOND, DISC, DomainSpec, ellipsoid, random_points
from .family import solve_tangent
from .geodesics import (
    common_left_inverse_criterion,
    common_linear_left_inverse,
    feasible_moduli,
    geodesic_through,
    left_inverse_for,
    random_two_zero_params,
    splice_real_geodesic,
    validate_real_geodesic,
    verify_left_inverse,
)
from .hyperbolic import poincare_distance
from .metrics import kappa_diamond, metric_certificate
from .oracle import Budget, PairProblem, TangentProblem, sandwich

WIDTH = 2e-4
SLACK = 1e-9
METRIC_MARGIN = 0.15
PAIR_MARGIN = 0.1


@dataclass
class Check:
    name: str
    statement: str
    measured: float
    tolerance: float
    passed: bool
    seconds: float = 0.0
    time_limit: float = math.inf
    detail: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return bool(self.passed and self.seconds <= self.time_limit)

    def line(self) -> str:
        verdict = "PASS" if self.ok else "FAIL"
        return (f"{verdict} {self.name}: measured {self.measured:.3e} vs tolerance {self.tolerance:.1e}"
                f" ({self.seconds:.1f} s, limit {self.time_limit:.0f} s)")

    def to_dict(self, timing: bool = True) -> dict:
        """With ``timing = False`` the verdict ignores run time and the dict is reproducible."""
        d = {"name": self.name, "statement": self.statement, "measured": float(self.measured),
             "tolerance": float(self.tolerance), "passed": self.ok if timing else bool(self.passed),
             "detail": self.detail}
        if timing:
            d.update(seconds=round(self.seconds, 3), time_limit=self.time_limit)
        return d


class _Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0


def _grid(n: int, top: float = 0.95) -> np.ndarray:
    return top * (np.arange(n) + 0.5) / n


def _unit(rng, n):
    X = rng.normal(size=(n, 2)) + 1j * rng.normal(size=(n, 2))
    return X / np.linalg.norm(X, axis=1)[:, None]


# ---------------------------------------------------------------------------
# distance identities


def check_axis_identity(n: int = 20, budget: Budget | None = None) -> Check:
    """Sandwich midpoint of ``((t, 0), (0, s))`` against ``p(-t, s)``."""
    worst, uncert = 0.0, 0
    with _Timer() as tm:
        for t in _grid(n):
            for s in _grid(n):
                c = sandwich(DIAMOND, PairProblem((t, 0.0), (0.0, s)), budget)
                uncert += not c.certified
                worst = max(worst, abs(c.midpoint - poincare_distance(-t, s)))
    return Check("axis-distance", "k((t,0),(0,s)) = p(-t,s) on a grid", worst, WIDTH,
                 worst < WIDTH, tm.seconds, 300, {"grid": n, "uncertified": uncert})


def check_vertical_identity(n: int = 20, budget: Budget | None = None) -> Check:
    """Sandwich midpoint of ``((t, 0), (t, s))`` against ``p(0, s / (1 - t))``."""
    worst, uncert = 0.0, 0
    with _Timer() as tm:
        for t in _grid(n):
            for f in _grid(n):
                s = f * (1.0 - t)
                c = sandwich(DIAMOND, PairProblem((t, 0.0), (t, s)), budget)
                uncert += not c.certified
                worst = max(worst, abs(c.midpoint - poincare_distance(0.0, s / (1.0 - t))))
    return Check("vertical-distance", "k((t,0),(t,s)) = p(0, s/(1-t)) on a grid", worst, WIDTH,
                 worst < WIDTH, tm.seconds, 300, {"grid": n, "uncertified": uncert})


# ---------------------------------------------------------------------------
# metric formula


def check_origin_indicatrix(n: int = 1000, n_oracle: int = 50, budget: Budget | None = None) -> list:
    """At the origin the metric is ``|X1| + |X2|``: formula and oracle."""
    dirs = analysis.sphere_directions(n)
    with _Timer() as tm:
        ref = np.abs(dirs).sum(axis=1)
        formula = max(abs(kappa_diamond((0, 0), u).value - r) for u, r in zip(dirs, ref))
        oracle = 0.0
        for u, r in zip(dirs[:: max(n // n_oracle, 1)][:n_oracle], ref[:: max(n // n_oracle, 1)]):
            oracle = max(oracle, abs(metric_certificate(DIAMOND, (0, 0), u, budget).midpoint - r))
    return [
        Check("origin-indicatrix-formula", "kappa(0;u) = |u1|+|u2| by the max/min formula", formula, 1e-6,
              formula < 1e-6, tm.seconds, 120, {"directions": n}),
        Check("origin-indicatrix-oracle", "kappa(0;u) = |u1|+|u2| by the sandwich", oracle, 1e-4,
              oracle < 1e-4, tm.seconds, 120, {"directions": n_oracle}),
    ]


def check_formula_vs_oracle(n: int = 500, seed: int = 0, budget: Budget | None = None) -> Check:
    rng = np.random.default_rng(seed)
    Z = random_points(DIAMOND, n, rng, METRIC_MARGIN)
    X = _unit(rng, n)
    worst, widest, uncert = 0.0, 0.0, 0
    achievers = {}
    with _Timer() as tm:
        for z, x in zip(Z, X):
            r = kappa_diamond(z, x, seed)
            c = metric_certificate(DIAMOND, z, x, budget)
            achievers[r.achiever.value] = achievers.get(r.achiever.value, 0) + 1
            uncert += not c.certified
            widest = max(widest, c.width)
            worst = max(worst, abs(r.value - c.midpoint))
    ok = worst < WIDTH and widest < WIDTH
    return Check("metric-formula-vs-oracle", "max/min metric formula = sandwich midpoint", worst, WIDTH, ok,
                 tm.seconds, 1200, {"samples": n, "max_width": widest, "uncertified": uncert,
                                     "achievers": achievers, "margin": METRIC_MARGIN})


def check_branched_covering(n: int = 500, seed: int = 0) -> list:
    """``kappa_E(z;X) >= kappa_diamond(Phi(z); dPhi X)``; equality for zero-free extremal discs."""
    out = []
    for p in ((2, 1), (1, 2), (2, 2)):
        rng = np.random.default_rng([seed, *p])
        E = ellipsoid(*p)
        Z = random_points(E, n, rng, METRIC_MARGIN)
        X = _unit(rng, n)
        worst_slack, worst_eq, n_eq, unsolved = math.inf, 0.0, 0, 0
        with _Timer() as tm:
            for z, x in zip(Z, X):
                sol = solve_tangent(p, z, x, seed=seed)
                if sol is None:
                    unsolved += 1
                    continue
                kE = 1.0 / sol.scale
                w = np.array([z[j] ** p[j] for j in range(2)])
                Y = np.array([p[j] * z[j] ** (p[j] - 1) * x[j] for j in range(2)])
                kD = kappa_diamond(w, Y, seed).value
                worst_slack = min(worst_slack, kE - kD)
                if all(sol.params.component_zero_free(j + 1, 1e-7) for j in range(2) if p[j] == 2):
                    n_eq += 1
                    worst_eq = max(worst_eq, abs(kE - kD))
        ok = worst_slack >= -1e-6 and worst_eq < 1e-4 and unsolved == 0
        out.append(Check(f"branched-covering-{p[0]}{p[1]}", "pullback inequality, equality when zero-free",
                         worst_eq, 1e-4, ok, tm.seconds, 300,
                         {"min_slack": worst_slack, "equality_cases": n_eq, "unsolved": unsolved}))
    return out


def check_sandwich_integrity(n: int = 2000, seed: int = 0, budget: Budget | None = None) -> Check:
    """``lower <= upper`` everywhere; on the diamond the lower bound is the certified value."""
    domains = (DISC, BALL, ellipsoid(1, 2), ellipsoid(2, 1), DIAMOND)
    rng = np.random.default_rng(seed)
    worst_order, worst_gap, uncert_diamond, n_diamond = -math.inf, 0.0, 0, 0
    with _Timer() as tm:
        for k in range(n):
            D = domains[k % len(domains)]
            tangent = (k // len(domains)) % 2 == 1
            margin = METRIC_MARGIN if tangent else PAIR_MARGIN
            P = random_points(D, 2, rng, margin)
            if tangent:
                X = _unit(rng, 1)[0]
                if D.is_disc:
                    X = np.array([X[0] / abs(X[0]), 0.0])
                c = sandwich(D, TangentProblem(tuple(P[0]), tuple(X)), budget)
            else:
                c = sandwich(D, PairProblem(tuple(P[0]), tuple(P[1])), budget)
            worst_order = max(worst_order, c.lower - c.upper)
            if D.kind == "diamond":
                n_diamond += 1
                uncert_diamond += not c.certified
                worst_gap = max(worst_gap, c.midpoint - c.lower)
    ok = worst_order <= SLACK and worst_gap < WIDTH and uncert_diamond == 0
    return Check("sandwich-integrity", "lower <= upper; diamond lower bound equals certified value",
                 worst_gap, WIDTH, ok, tm.seconds, 1800,
                 {"problems": n, "max_lower_minus_upper": worst_order, "diamond_problems": n_diamond,
                  "diamond_uncertified": uncert_diamond})


# ---------------------------------------------------------------------------
# geodesics


def check_left_inverses(n: int = 100, pairs_each: int = 5, seed: int = 0, budget: Budget | None = None) -> list:
    rng = np.random.default_rng(seed)
    worst_res, worst_dist, uncert = 0.0, 0.0, 0
    with _Timer() as tm:
        for _ in range(n):
            g = random_two_zero_params(rng)
            F = left_inverse_for(g)
            worst_res = max(worst_res, verify_left_inverse(F, g))
            for _ in range(pairs_each):
                lam = 0.6 * np.sqrt(rng.uniform(size=2)) * np.exp(1j * rng.uniform(-np.pi, np.pi, 2))
                c = sandwich(DIAMOND, PairProblem(tuple(g(lam[0])), tuple(g(lam[1]))), budget)
                uncert += not c.certified
                worst_dist = max(worst_dist, abs(c.midpoint - poincare_distance(lam[0], lam[1])))
    return [
        Check("left-inverse-residual", "linear left inverse recovers lambda", worst_res, 1e-8,
              worst_res < 1e-8, tm.seconds, 600, {"geodesics": n}),
        Check("geodesic-isometry", "k(f(s), f(t)) = p(s, t)", worst_dist, WIDTH, worst_dist < WIDTH,
              tm.seconds, 600, {"pairs": n * pairs_each, "uncertified": uncert}),
    ]


def _shared_face_pair(rng):
    while True:
        w = random_points(DIAMOND, 1, rng, 0.3)[0]
        u = np.exp(1j * rng.uniform(-np.pi, np.pi, 2))
        iv = feasible_moduli(w, u)
        if iv is None or iv[1] - iv[0] < 0.05:
            continue
        x = iv[0] + (iv[1] - iv[0]) * np.array([0.25, 0.75])
        return geodesic_through(w, u, x[0]), geodesic_through(w, u, x[1])


def _violating_pair(rng):
    while True:
        w = random_points(DIAMOND, 1, rng, 0.3)[0]
        u = np.exp(1j * rng.uniform(-np.pi, np.pi, 2))
        v = u * np.exp(1j * np.array([0.0, rng.uniform(0.5, np.pi)]))
        iu, iv = feasible_moduli(w, u), feasible_moduli(w, v)
        if iu is None or iv is None:
            continue
        return geodesic_through(w, u, 0.5 * sum(iu)), geodesic_through(w, v, 0.5 * sum(iv))


def check_common_left_inverse(n: int = 25, seed: int = 0) -> Check:
    """Criterion true and splice valid for shared faces; both fail otherwise."""
    rng = np.random.default_rng(seed)
    failures = []
    with _Timer() as tm:
        for k in range(n):
            f, g = _shared_face_pair(rng)
            w = f(0.0)
            crit = common_left_inverse_criterion(w, f.derivative(0.0), g.derivative(0.0))
            splice_ok = crit and validate_real_geodesic(splice_real_geodesic(f, g), n=5)
            if not (crit and splice_ok):
                failures.append(("shared", k))
        for k in range(n):
            f, g = _violating_pair(rng)
            crit = common_left_inverse_criterion(f(0.0), f.derivative(0.0), g.derivative(0.0))
            if crit or common_linear_left_inverse(f, g) is not None:
                failures.append(("violating", k))
    return Check("common-left-inverse", "segment criterion <=> common linear left inverse", len(failures), 0.5,
                 not failures, tm.seconds, 600, {"pairs": 2 * n, "failures": failures})


# ---------------------------------------------------------------------------
# indicatrix


def check_strict_convexity(n_directions: int = 1000, n_points: int = 5, seed: int = 0,
                           face_resolution: float = 0.05) -> list:
    out = []
    rng = np.random.default_rng(seed)
    for D in (BALL, ellipsoid(2, 1)):
        flats, inconclusive = 0, 0
        with _Timer() as tm:
            for p in random_points(D, n_points, rng, 0.2):
                s = analysis.sample_indicatrix(D, p, n_directions, seed)
                flags = analysis.classify_flatness(s, seed)
                flats += flags.count(analysis.Flag.FLAT)
                inconclusive += flags.count(analysis.Flag.INCONCLUSIVE)
        out.append(Check(f"strict-convexity-{D}", "no flat directions in the indicatrix", flats, 0.5,
                         flats == 0, tm.seconds, 30 if D.kind == "ball" else 480, {"base_points": n_points, "inconclusive": inconclusive}))
    with _Timer() as tm:
        s = analysis.sample_indicatrix(DIAMOND, (0, 0), n_directions, seed)
        flags = analysis.classify_flatness(s, seed)
        share = np.min(np.abs(s.directions), axis=1) / np.abs(s.directions).sum(axis=1)
        flat = np.array([f == analysis.Flag.FLAT for f in flags])
        off_face = [i for i in np.flatnonzero(flat) if not analysis.is_cross_face(s.directions[i])]
        misaligned = [i for i in np.flatnonzero(flat)
                      if abs(np.dot(s.details[i]["pair_direction"], analysis.face_direction(s.directions[i]))) < 1 - 1e-6]
        missed = int(np.sum(~flat & (share >= face_resolution)))
    ok = bool(flat.any()) and not off_face and not misaligned and missed == 0
    out.append(Check("diamond-faces", "flat directions of the diamond indicatrix are its faces", missed, 0.5,
                     ok, tm.seconds, 90, {"flat": int(flat.sum()), "off_face": len(off_face),
                                           "misaligned": len(misaligned), "face_resolution": face_resolution,
                                           "min_flat_share": float(share[flat].min()) if flat.any() else None}))
    return out


# ---------------------------------------------------------------------------
# rigidity


def check_rigidity(pairs: int = 500, seed: int = 7, n_random: int = 1000, budget: Budget | None = None,
                   progress=None) -> tuple:
    with _Timer() as tm:
        report = analysis.rigidity_report(pairs, seed, n_random, budget=budget, progress=progress)
    cands = report["candidates"]
    fam = [c for c in cands if c["family_member"]]
    non = [c for c in cands if not c["family_member"]]
    fam_ok = all(c["pass"] and c["defect"]["certified_pairs"] >= pairs for c in fam)
    non_ok = all(c["pass"] and c["defect"]["witness"] is not None and c["witness_off_axis"] for c in non)
    worst_family = max(c["defect"]["defect"] for c in fam)
    least_rejected = min(c["defect"]["defect"] for c in non)
    checks = [
        Check("rigidity-family", "family members are isometries", worst_family, analysis.FAMILY_THRESHOLD,
              fam_ok, tm.seconds, 1800, {"candidates": len(fam)}),
        Check("rigidity-rejection", "non-family candidates exceed the rejection threshold off the axes",
              least_rejected, analysis.REJECTION_THRESHOLD, non_ok, tm.seconds, 1800, {"candidates": len(non)}),
    ]
    return checks, report


def check_indicatrix_images(n_points: int = 10, n: int = 16, seed: int = 0) -> Check:
    rng = np.random.default_rng(seed)
    worst = 0.0
    with _Timer() as tm:
        for w in random_points(DIAMOND, n_points, rng, 0.2):
            for F in analysis.family_candidates():
                worst = max(worst, analysis.indicatrix_image_check(F, DIAMOND, DIAMOND, w, n, seed))
    return Check("indicatrix-image", "family members map indicatrices onto indicatrices", worst, 1e-6,
                 worst < 1e-6, tm.seconds, 600, {"base_points": n_points, "directions": n})


def check_axis_isometry(n: int = 50, seed: int = 0) -> Check:
    """Half-conjugation preserves distances between points of different axes."""
    F = analysis.CandidateIsometry(analysis.CandidateKind.HalfConjugation, which=2)
    with _Timer() as tm:
        d = analysis.isometry_defect(F, pairs=analysis.axis_pairs(n, seed))
    return Check("axis-isometry", "half-conjugation is isometric on the axes", d.defect,
                 analysis.FAMILY_THRESHOLD, d.defect < analysis.FAMILY_THRESHOLD, tm.seconds, 120, {"pairs": n})


# ---------------------------------------------------------------------------
# suites


SUITES = ("formulas", "geodesics", "indicatrix", "rigidity", "all")


def run_suite(name: str, seed: int = 0, pairs: int = 500, budget: Budget | None = None,
              quick: bool = False, progress=None, timing: bool = True) -> dict:
    """Run a named suite; ``quick`` shrinks sample counts for smoke testing."""
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    q = (lambda full, small: small) if quick else (lambda full, small: full)
    say = progress or (lambda msg: None)
    checks, extra = [], {}
    if name in ("formulas", "all"):
        checks.append(check_axis_identity(q(20, 3), budget))
        checks.append(check_vertical_identity(q(20, 3), budget))
        checks.append(check_formula_vs_oracle(q(500, 5), seed, budget))
        checks += check_branched_covering(q(500, 5), seed)
        checks.append(check_sandwich_integrity(q(2000, 10), seed, budget))
    if name in ("geodesics", "all"):
        checks += check_left_inverses(q(100, 3), q(5, 1), seed, budget)
        checks.append(check_common_left_inverse(q(25, 2), seed))
    if name in ("indicatrix", "all"):
        checks += check_origin_indicatrix(1000, q(50, 5), budget)
        checks += check_strict_convexity(1000, q(5, 1), seed)
    if name in ("rigidity", "all"):
        rc, report = check_rigidity(pairs, seed, q(1000, 10), budget, say)
        checks += rc
        checks.append(check_indicatrix_images(q(10, 2), 16, seed))
        checks.append(check_axis_isometry(q(50, 5), seed))
        extra["rigidity"] = report
    for c in checks:
        say(c.line())
    rows = [c.to_dict(timing) for c in checks]
    return {"suite": name, "seed": seed, "passed": all(r["passed"] for r in rows), "checks": rows, **extra}
