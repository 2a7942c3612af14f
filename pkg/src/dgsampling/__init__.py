"""Deterministic gradient sampling for nonsmooth, locally Lipschitz functions.

The central piece is a bisection that finds a new epsilon-subgradient when
the current bundle's min-norm direction fails the sufficient-descent test.
It provably stops for weakly lower semismooth functions.
"""

from .bisection import (
    BisectionCaps,
    Found,
    IntervalExhausted,
    bisect_improved,
    bisect_legacy,
    c_min,
    h_tilde,
)
from .core import (
    AlgorithmFailure,
    Descent,
    DescentParams,
    DescentTrace,
    EpsCritical,
    FunctionOracle,
    GradientBundle,
    InvalidArgument,
    SolverFailure,
    bundle_insert,
)
from .direction import descent_direction, sufficient_descent
from .geometry import d2_fraction, detection_probability, table1
from .minnorm import min_norm_point, steepest_direction
from .optimizer import GSParams, gs_direction, minimize_deterministic, minimize_random_gs, sample_ball
from .testfns import counterexample_oracle, cone_oracle, get_oracle

__all__ = [
    "AlgorithmFailure",
    "bisect_improved",
    "bisect_legacy",
    "BisectionCaps",
    "bundle_insert",
    "c_min",
    "cone_oracle",
    "counterexample_oracle",
    "d2_fraction",
    "Descent",
    "descent_direction",
    "DescentParams",
    "DescentTrace",
    "detection_probability",
    "EpsCritical",
    "Found",
    "FunctionOracle",
    "get_oracle",
    "GradientBundle",
    "gs_direction",
    "GSParams",
    "h_tilde",
    "IntervalExhausted",
    "InvalidArgument",
    "min_norm_point",
    "minimize_deterministic",
    "minimize_random_gs",
    "sample_ball",
    "SolverFailure",
    "steepest_direction",
    "sufficient_descent",
    "table1",
]

__version__ = "0.1.0"
