"""Outer descent loops.

``minimize_deterministic`` uses the bundle-enrichment directions and takes
the certified full step eps/|v|. ``minimize_random_gs`` is a simplified
random gradient-sampling baseline: it samples m gradients uniformly in the
eps-ball and uses a backtracking line search. It has no differentiability
check and no perturbation of the iterates.

Both halve eps (and delta) whenever the current point looks eps-critical and
stop once eps < eps_min.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    CountingOracle,
    DescentTrace,
    EpsCritical,
    InvalidArgument,
    TraceRow,
    as_vector,
)
from .direction import default_delta, descent_direction
from .minnorm import min_norm_point

log = logging.getLogger(__name__)


def minimize_deterministic(oracle, x_init, params, callback=None):
    """Deterministic gradient sampling with eps-halving; returns a DescentTrace.

    Each row describes one outer iteration at its starting point. ``step`` is
    True when a descent step was taken from that point.
    """
    x = as_vector(x_init, "x_init").copy()
    counter = CountingOracle(oracle)
    fx = counter.eval(x)
    eps = params.eps
    delta = params.delta if params.delta is not None else default_delta(fx)
    trace = DescentTrace()

    k = 0
    while eps >= params.eps_min and delta >= params.delta_min:
        if k >= params.max_outer:
            trace.complete = False
            log.warning("max_outer=%d reached; trace truncated", params.max_outer)
            break
        res, stats = descent_direction(counter, x, params, eps=eps, delta=delta)
        nv = res.v_norm
        row = TraceRow(
            iter=k, x=x.copy(), fx=fx, eps=eps, vnorm=nv,
            oracle_evals=counter.n_eval, oracle_subgrads=counter.n_subgrad,
            bundle_size=len(res.bundle), bisect_iters=stats.bisect_iters,
            step=not isinstance(res, EpsCritical),
        )
        trace.rows.append(row)
        if callback is not None:
            callback(row)
        if isinstance(res, EpsCritical):
            eps *= params.shrink
            delta *= params.shrink
        else:
            x, fx = res.x_new, res.f_new
        k += 1

    trace.x, trace.fx = x, fx
    return trace


@dataclass(frozen=True)
class GSParams:
    """Parameters of the random gradient-sampling baseline.

    ``m=None`` means 2n samples per iteration. ``beta`` and ``max_backtrack``
    control the Armijo backtracking line search.
    """

    m: Optional[int] = None
    eps: float = 1.0
    c: float = 0.5
    delta: Optional[float] = None
    eps_min: float = 1e-6
    delta_min: float = 1e-14
    shrink: float = 0.5
    seed: int = 0
    max_outer: int = 10_000
    beta: float = 0.5
    max_backtrack: int = 30

    def __post_init__(self):
        if self.m is not None and (int(self.m) != self.m or self.m < 1):
            raise InvalidArgument(f"m must be >= 1, got {self.m}")
        if not 0.0 < self.c < 1.0:
            raise InvalidArgument(f"c must lie in (0, 1), got {self.c}")
        if not self.eps > 0 or not self.eps_min > 0:
            raise InvalidArgument("eps and eps_min must be positive")
        if not 0.0 < self.shrink < 1.0 or not 0.0 < self.beta < 1.0:
            raise InvalidArgument("shrink and beta must lie in (0, 1)")
        if self.delta is not None and not self.delta > 0:
            raise InvalidArgument("delta must be positive")

    def samples(self, n):
        return self.m if self.m is not None else 2 * n


def make_rng(seed, *stream):
    """PCG64 generator for ``seed`` (optionally a sub-stream such as a trial index)."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), *map(int, stream)])))


def sample_ball(rng, center, eps, m):
    """m i.i.d. uniform points in the closed ball B_eps(center), shape (m, n).

    Direction: normalized standard normal; radius: eps * U^(1/n).
    """
    center = as_vector(center, "center")
    if not eps > 0:
        raise InvalidArgument("eps must be positive")
    if int(m) != m or m < 1:
        raise InvalidArgument(f"m must be >= 1, got {m}")
    n = center.shape[0]
    g = rng.standard_normal((int(m), n))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    # a zero draw has probability zero; guard anyway
    norms[norms == 0.0] = 1.0
    r = eps * rng.random((int(m), 1)) ** (1.0 / n)
    return center + g / norms * r


def gs_bundle(oracle, x0, eps, m, rng, include_center=True):
    """Sampled gradients (plus the one at x0) and the sample points."""
    x0 = as_vector(x0, "x0")
    ys = sample_ball(rng, x0, eps, m)
    grads = [oracle.subgrad(y) for y in ys]
    if include_center:
        grads.insert(0, oracle.subgrad(x0))
    return np.vstack(grads), ys


def gs_direction(oracle, x0, params, rng=None, include_center=True):
    """v^GS: negative min-norm point of the sampled gradients' hull."""
    x0 = as_vector(x0, "x0")
    if rng is None:
        rng = make_rng(params.seed)
    W, _ = gs_bundle(oracle, x0, params.eps, params.samples(x0.shape[0]), rng, include_center)
    sol = min_norm_point(W)
    return -sol.xi_star


def minimize_random_gs(oracle, x_init, params):
    """Random gradient sampling with Armijo backtracking; returns a DescentTrace."""
    x = as_vector(x_init, "x_init").copy()
    n = x.shape[0]
    m = params.samples(n)
    rng = make_rng(params.seed)
    counter = CountingOracle(oracle)
    fx = counter.eval(x)
    eps = params.eps
    delta = params.delta if params.delta is not None else default_delta(fx)
    trace = DescentTrace()

    k = 0
    while eps >= params.eps_min and delta >= params.delta_min:
        if k >= params.max_outer:
            trace.complete = False
            break
        W, _ = gs_bundle(counter, x, eps, m, rng)
        v = -min_norm_point(W).xi_star
        nv = float(np.linalg.norm(v))
        stepped = False
        if nv > delta:
            t = eps / nv
            for _ in range(params.max_backtrack):
                y = x + t * v
                fy = counter.eval(y)
                if fy <= fx - params.c * t * nv * nv and fy < fx:
                    stepped = True
                    break
                t *= params.beta
        trace.rows.append(TraceRow(
            iter=k, x=x.copy(), fx=fx, eps=eps, vnorm=nv,
            oracle_evals=counter.n_eval, oracle_subgrads=counter.n_subgrad,
            bundle_size=W.shape[0], bisect_iters=0, step=stepped,
        ))
        if stepped:
            x, fx = y, fy
        else:
            eps *= params.shrink
            delta *= params.shrink
        k += 1

    trace.x, trace.fx = x, fx
    return trace


def in_d2(points):
    """Row-wise membership in D2 = {x : pr(x) != 0, x_n > |pr(x)|}."""
    points = np.atleast_2d(points)
    r = np.linalg.norm(points[:, :-1], axis=1)
    return (r > 0.0) & (points[:, -1] > r)


def mc_detection_rate(n, m, trials, seed, chunk=20_000):
    """Fraction of trials in which >= 1 of m uniform unit-ball samples lies in D2.

    Trials are drawn in chunks; chunk k uses the stream (seed, n, k), so the
    estimate depends only on (n, m, trials, seed, chunk).
    Returns ``(estimate, binomial standard error)``.
    """
    if int(trials) != trials or trials < 1:
        raise InvalidArgument(f"trials must be >= 1, got {trials}")
    hits = 0
    done = 0
    k = 0
    center = np.zeros(n)
    while done < trials:
        size = min(chunk, trials - done)
        rng = make_rng(seed, n, k)
        pts = sample_ball(rng, center, 1.0, size * m)
        hits += int(np.count_nonzero(in_d2(pts).reshape(size, m).any(axis=1)))
        done += size
        k += 1
    p = hits / trials
    return p, float(np.sqrt(max(p * (1 - p), 0.0) / trials))
