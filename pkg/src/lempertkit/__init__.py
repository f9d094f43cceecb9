"""Invariant distances and metrics on the diamond {|z1| + |z2| < 1} and related model domains."""

import os as _os

# LEMPERTKIT_THREADS caps the BLAS thread pools; it must be applied before numpy loads
_threads = _os.environ.get("LEMPERTKIT_THREADS")
if _threads and _threads.isdigit() and int(_threads) > 0:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

from .domains import BALL, DIAMOND, DISC, DiamondSymmetry, DomainSpec, diamond_symmetry, ellipsoid  # noqa: E402
from .family import GeodesicParams  # noqa: E402
from .hyperbolic import DiscAutomorphism, poincare_distance, poincare_metric  # noqa: E402
from .metrics import (  # noqa: E402
    Achiever,
    MetricResult,
    UncertifiedError,
    kappa,
    kappa_diamond,
    kobayashi_distance,
    m_diamond,
)
from .oracle import Budget, PairProblem, SandwichCertificate, TangentProblem, sandwich  # noqa: E402

__version__ = "0.1.0"

__all__ = [
    "Achiever", "BALL", "Budget", "DIAMOND", "DISC", "DiamondSymmetry", "DiscAutomorphism", "DomainSpec",
    "GeodesicParams", "MetricResult", "PairProblem", "SandwichCertificate", "TangentProblem",
    "UncertifiedError", "diamond_symmetry", "ellipsoid", "kappa", "kappa_diamond", "kobayashi_distance",
    "m_diamond", "poincare_distance", "poincare_metric", "sandwich",
]
