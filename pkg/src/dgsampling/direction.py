"""Deterministic descent directions by iterative bundle enrichment.

Start from W = {xi} with xi a subgradient at x0. While the min-norm direction
of conv(W) neither vanishes nor passes the sufficient-descent test, the
improved bisection supplies a subgradient outside conv(W), which is added.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bisection import IntervalExhausted, bisect_improved
from .core import (
    AlgorithmFailure,
    CountingOracle,
    Descent,
    EpsCritical,
    GradientBundle,
    InvalidArgument,
    as_vector,
)
from .minnorm import DEFAULT_TOL, min_norm_point


class BisectionExhausted(AlgorithmFailure):
    """The bisection ran out of interval; ``state`` holds the bisection state."""


@dataclass
class DirectionStats:
    n_eval: int = 0
    n_subgrad: int = 0
    bisect_iters: int = 0
    enrichments: int = 0
    v_norms: list = field(default_factory=list)


def default_delta(f0):
    return 1e-6 * max(1.0, abs(float(f0)))


def sufficient_descent(oracle, x0, eps, c, v):
    """True iff f(x0 + eps/|v| v) <= f(x0) - c eps |v|."""
    x0 = as_vector(x0, "x0")
    v = as_vector(v, "v")
    nv = float(np.linalg.norm(v))
    if nv == 0.0:
        raise InvalidArgument("direction v must be nonzero")
    return oracle.eval(x0 + (eps / nv) * v) - oracle.eval(x0) <= -c * eps * nv


def descent_direction(oracle, x0, params, eps=None, delta=None, callback=None, tol=DEFAULT_TOL):
    """Grow a gradient bundle at x0 until it certifies descent or criticality.

    ``eps`` and ``delta`` override ``params.eps`` / ``params.delta`` (the
    outer loop shrinks both). Returns ``(EpsCritical | Descent, DirectionStats)``.

    ``callback``, if given, receives one dict per loop pass with keys
    ``bundle_size``, ``v_norm`` and ``bisect_iters``.
    """
    x0 = as_vector(x0, "x0")
    eps = params.eps if eps is None else eps
    if not eps > 0:
        raise InvalidArgument("eps must be positive")
    c = params.c
    counter = oracle if isinstance(oracle, CountingOracle) else CountingOracle(oracle)
    start_eval, start_sub = counter.n_eval, counter.n_subgrad
    stats = DirectionStats()

    def finish(result):
        stats.n_eval = counter.n_eval - start_eval
        stats.n_subgrad = counter.n_subgrad - start_sub
        return result, stats

    f0 = counter.eval(x0)
    if delta is None:
        delta = params.delta if params.delta is not None else default_delta(f0)

    W = GradientBundle([counter.subgrad(x0)], max_size=params.bundle_cap(x0.shape[0]))
    while True:
        sol = min_norm_point(W, tol)
        v = -sol.xi_star
        nv = sol.norm
        stats.v_norms.append(nv)
        if nv <= delta:
            if callback is not None:
                callback({"bundle_size": len(W), "v_norm": nv, "bisect_iters": 0})
            return finish(EpsCritical(v_norm=nv, v=v, bundle=W))

        x_new = x0 + (eps / nv) * v
        f_end = counter.eval(x_new)
        certificate = f_end - f0
        if certificate <= -c * eps * nv:
            if callback is not None:
                callback({"bundle_size": len(W), "v_norm": nv, "bisect_iters": 0})
            return finish(Descent(v=v, bundle=W, certificate=certificate, x_new=x_new, f_new=f_end))

        out = bisect_improved(counter, x0, eps, c, v, f0=f0, f_end=f_end)
        stats.bisect_iters += out.state.j
        if callback is not None:
            callback({"bundle_size": len(W), "v_norm": nv, "bisect_iters": out.state.j})
        if isinstance(out, IntervalExhausted):
            raise BisectionExhausted(
                f"bisection exhausted after {out.iterations} midpoints at x0={x0.tolist()}",
                state=out.state,
            )
        if not W.insert(out.xi_new):
            raise AlgorithmFailure(
                "bisection returned a subgradient already in the bundle",
                state={"bundle": W.as_array(), "xi": out.xi_new},
            )
        stats.enrichments += 1
