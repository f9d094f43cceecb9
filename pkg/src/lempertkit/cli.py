"""Command-line front end.

Points and vectors are given as comma-separated ``re,im,re,im`` quadruples.
Output is JSON (or CSV for indicatrix samples) tagged with a schema version;
the same arguments and seed always produce byte-identical output.

Exit codes: 0 ok, 1 invalid input, 2 uncertified result, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .domains import DomainSpec, OutsideDomainError, require_inside
from .family import GeodesicParams
from .geodesics import (
    NoLinearLeftInverse,
    PreconditionError,
    evaluate_geodesic,
    left_inverse_for,
    sample_lambdas,
    verify_left_inverse,
)
from .hyperbolic import OutsideDiscError
from .metrics import kappa, kappa_diamond, kobayashi_distance, metric_certificate
from .oracle import Budget

SCHEMA_VERSION = "1"
EXIT_OK, EXIT_INPUT, EXIT_UNCERTIFIED, EXIT_VERIFY = 0, 1, 2, 3


class InputError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    width: float = 2e-4
    metric_slack: float = 1e-6
    degree: int = 4
    restarts: int = 24
    seed: int = 0
    format: str = "json"
    output: Optional[str] = None

    def __post_init__(self):
        if not (self.width > 0 and self.metric_slack > 0):
            raise InputError("tolerances must be positive")
        if self.seed < 0:
            raise InputError("seed must be nonnegative")

    @property
    def budget(self) -> Budget:
        try:
            return Budget(self.degree, self.restarts, self.width, self.seed)
        except ValueError as exc:
            raise InputError(str(exc)) from exc

    def to_dict(self) -> dict:
        return {"width": self.width, "metric_slack": self.metric_slack, "degree": self.degree,
                "restarts": self.restarts, "seed": self.seed}


def parse_point(text: str, name: str = "point") -> np.ndarray:
    """``"re1,im1,re2,im2"`` to a complex pair."""
    try:
        v = [float(t) for t in text.split(",")]
    except ValueError as exc:
        raise InputError(f"{name}: expected four comma-separated numbers, got {text!r}") from exc
    if len(v) != 4 or not all(np.isfinite(v)):
        raise InputError(f"{name}: expected four finite comma-separated numbers, got {text!r}")
    return np.array([complex(v[0], v[1]), complex(v[2], v[3])])


def parse_domain(text: str) -> DomainSpec:
    try:
        return DomainSpec.parse(text)
    except (ValueError, KeyError) as exc:
        raise InputError(f"domain: {exc}") from exc


def _pt(z) -> list:
    return [[float(complex(c).real), float(complex(c).imag)] for c in z]


def _inside(D, z, name):
    try:
        return require_inside(D, z, name)
    except (OutsideDomainError, ValueError) as exc:
        raise InputError(str(exc)) from exc


# ---------------------------------------------------------------------------
# commands; each returns (exit code, payload)


def cmd_dist(D: DomainSpec, w, z, config: RunConfig):
    w, z = _inside(D, w, "w"), _inside(D, z, "z")
    r = kobayashi_distance(D, w, z, config.budget)
    payload = {"command": "dist", "domain": str(D), "w": _pt(w), "z": _pt(z), **r.to_dict()}
    cert = payload.pop("certificate", None)
    payload["witnesses"] = None if cert is None else {"lower": cert["lower_witness"], "upper": cert["upper_witness"]}
    return (EXIT_OK if r.certified else EXIT_UNCERTIFIED), payload


def cmd_metric(D: DomainSpec, z, X, config: RunConfig):
    z = _inside(D, z, "z")
    if D.is_disc and X[1] != 0:
        raise InputError("X: tangent vectors of the disc slice must have a zero second coordinate")
    payload = {"command": "metric", "domain": str(D), "z": _pt(z), "X": _pt(X)}
    if D.kind == "diamond":
        r = kappa_diamond(z, X, config.seed)
        payload.update(value=float(r.value), achiever=r.achiever.value,
                       branches={k: (None if v is None else float(v)) for k, v in r.branches.items()})
    else:
        payload.update(value=float(kappa(D, z, X, config.seed)), achiever="ClosedForm" if D.kind in ("ball", "disc")
                       else "Oracle")
    if not np.any(X):
        return EXIT_OK, payload
    cert = metric_certificate(D, z, X, config.budget)
    payload["certificate"] = {"lower": float(cert.lower), "upper": float(cert.upper), "width": float(cert.width),
                              "certified": cert.certified,
                              "consistent": bool(cert.lower - config.metric_slack <= payload["value"]
                                                 <= cert.upper + config.metric_slack)}
    ok = cert.certified and payload["certificate"]["consistent"]
    return (EXIT_OK if ok else EXIT_UNCERTIFIED), payload


def cmd_geodesic(params: dict, lambdas, validate: bool):
    try:
        g = GeodesicParams.from_dict(params)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise InputError(f"geodesic parameters: {exc}") from exc
    payload = {"command": "geodesic", "params": g.to_dict()}
    if lambdas:
        try:
            vals = [evaluate_geodesic(g, complex(lam)) for lam in lambdas]
        except (OutsideDiscError, ValueError) as exc:
            raise InputError(str(exc)) from exc
        payload["values"] = [{"lambda": [lam.real, lam.imag], "f": _pt(v)} for lam, v in zip(lambdas, vals)]
    code = EXIT_OK
    if validate:
        checks = {"relation_residual": float(g.relation_residual()), "maps_into_domain": g.maps_into_domain()}
        if g.q == (1.0, 1.0):
            try:
                F = left_inverse_for(g)
                checks["left_inverse"] = F.to_dict()
                checks["left_inverse_residual"] = verify_left_inverse(F, g)
            except (PreconditionError, NoLinearLeftInverse) as exc:
                checks["left_inverse"] = None
                checks["left_inverse_note"] = str(exc)
        checks["valid"] = bool(checks["relation_residual"] < 1e-9 and checks["maps_into_domain"])
        payload["validation"] = checks
        if not checks["valid"]:
            code = EXIT_VERIFY
    return code, payload


def cmd_indicatrix(D: DomainSpec, p, n: int, classify: bool, config: RunConfig):
    from .analysis import classify_flatness, sample_indicatrix

    p = _inside(D, p, "p")
    if n < 1:
        raise InputError("n must be positive")
    s = sample_indicatrix(D, p, n, config.seed)
    if classify:
        try:
            classify_flatness(s, config.seed)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    return EXIT_OK, f"# schema_version={SCHEMA_VERSION} domain={D} seed={config.seed}\n" + s.to_csv()


def cmd_verify(suite: str, config: RunConfig, pairs: int, quick: bool, log=None):
    from .verify import SUITES, run_suite

    if suite not in SUITES:
        raise InputError(f"suite must be one of {', '.join(SUITES)}")
    if pairs < 1:
        raise InputError("pairs must be positive")
    # run times vary between runs, so the machine-readable verdict uses tolerances only
    report = run_suite(suite, config.seed, pairs, config.budget, quick=quick, progress=log, timing=False)
    failing = [c["name"] for c in report["checks"] if not c["passed"]]
    report["failing"] = failing
    return (EXIT_OK if not failing else EXIT_VERIFY), {"command": "verify", **report}


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the invalid-input code rather than argparse's 2."""

    def error(self, message):
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="lempertkit", description=__doc__.splitlines()[0])
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="single source of randomness (default 0)")
    common.add_argument("--width", type=float, default=2e-4, help="target certificate width")
    common.add_argument("--metric-slack", type=float, default=1e-6)
    common.add_argument("--degree", type=int, default=4, help="polynomial degree cap of the oracle")
    common.add_argument("--restarts", type=int, default=24, help="oracle restarts")
    common.add_argument("--out", default=None, help="write output to this file instead of stdout")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("dist", parents=[common], help="Kobayashi distance with certificate")
    p.add_argument("--domain", default="diamond")
    p.add_argument("--w", required=True)
    p.add_argument("--z", required=True)

    p = sub.add_parser("metric", parents=[common], help="Kobayashi-Royden metric")
    p.add_argument("--domain", default="diamond")
    p.add_argument("--z", required=True)
    p.add_argument("--X", required=True)

    p = sub.add_parser("geodesic", parents=[common], help="evaluate or validate geodesic parameters (JSON)")
    p.add_argument("params", help="JSON object or path to a JSON file")
    p.add_argument("--lambda", dest="lambdas", action="append", default=[], help="re,im of a disc point")
    p.add_argument("--samples", type=int, default=0, help="also evaluate at this many built-in disc points")
    p.add_argument("--validate", action="store_true")

    p = sub.add_parser("indicatrix", parents=[common], help="CSV dump of indicatrix samples")
    p.add_argument("--domain", default="diamond")
    p.add_argument("--p", default="0,0,0,0")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--classify", action="store_true")

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", help="formulas, geodesics, indicatrix, rigidity or all")
    p.add_argument("--pairs", type=int, default=500)
    p.add_argument("--quick", action="store_true", help="reduced sample counts (smoke test)")
    return ap


def _lambda(text: str) -> complex:
    try:
        re_, im_ = (float(t) for t in text.split(","))
    except ValueError as exc:
        raise InputError(f"lambda: expected re,im, got {text!r}") from exc
    return complex(re_, im_)


def _load_json(text: str) -> dict:
    try:
        if text.lstrip().startswith("{"):
            return json.loads(text)
        with open(text) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"params: {exc}") from exc


def _check_threads():
    v = os.environ.get("LEMPERTKIT_THREADS")
    if v is not None and not (v.isdigit() and int(v) > 0):
        raise InputError(f"LEMPERTKIT_THREADS must be a positive integer, got {v!r}")


def run(argv=None) -> tuple:
    args = build_parser().parse_args(argv)
    _check_threads()
    config = RunConfig(args.width, args.metric_slack, args.degree, args.restarts, args.seed,
                       "csv" if args.command == "indicatrix" else "json", args.out)
    log = lambda msg: print(msg, file=sys.stderr)  # noqa: E731
    if args.command == "dist":
        D = parse_domain(args.domain)
        code, payload = cmd_dist(D, parse_point(args.w, "w"), parse_point(args.z, "z"), config)
    elif args.command == "metric":
        D = parse_domain(args.domain)
        code, payload = cmd_metric(D, parse_point(args.z, "z"), parse_point(args.X, "X"), config)
    elif args.command == "geodesic":
        lams = [_lambda(t) for t in args.lambdas] + list(sample_lambdas(args.samples) if args.samples else [])
        code, payload = cmd_geodesic(_load_json(args.params), lams, args.validate)
    elif args.command == "indicatrix":
        D = parse_domain(args.domain)
        code, payload = cmd_indicatrix(D, parse_point(args.p, "p"), args.n, args.classify, config)
    else:
        code, payload = cmd_verify(args.suite, config, args.pairs, args.quick, log)
    if isinstance(payload, dict):
        payload = {"schema_version": SCHEMA_VERSION, "config": config.to_dict(), **payload}
        payload = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    return code, payload, args.out


def main(argv=None) -> int:
    try:
        code, text, path = run(argv)
        if path:
            with open(path, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return code


if __name__ == "__main__":
    sys.exit(main())
