"""Bisection search for a new epsilon-subgradient along a bad direction.

Given x0, a radius eps and a direction v whose full step x0 + eps/|v| v does
not achieve f(x0) - c eps |v|, both routines bisect (0, eps/|v|) looking for
a point x0 + t v where the oracle returns xi' with <xi', v> > -c |v|^2. Such
an xi' cannot lie in the convex hull of a bundle whose min-norm point is -v.

``bisect_legacy`` bisects on h(t) = f(x0 + t v) - f(x0) + c t |v|^2. It can
stall forever on semismooth functions (see ``testfns.counterexample_oracle``).
``bisect_improved`` bisects on the same function with c replaced by some
c_tilde in (c_min, c), but keeps the stopping test with c. It terminates
for weakly lower semismooth f.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import InvalidArgument, as_vector


class BisectionInvariantError(AssertionError):
    """A runtime check on the bisection sequences failed."""


@dataclass(frozen=True)
class BisectionCaps:
    """Stop when b - a < width_rel * eps/|v| or after max_iter midpoints."""

    width_rel: float = 1e-14
    max_iter: int = 60


@dataclass(frozen=True)
class BisectionStep:
    """One executed midpoint: interval [a, b], midpoint t, and <xi', v> there."""

    j: int
    a: float
    b: float
    t: float
    inner: float


@dataclass
class BisectionState:
    x0: np.ndarray
    v: np.ndarray
    eps: float
    c: float
    c_tilde: float
    c_min: float
    f0: float
    a: float
    b: float
    t: float
    j: int
    h_a: float
    h_b: float
    steps: list = field(default_factory=list)


@dataclass(frozen=True)
class Found:
    """``xi_new`` was sampled at x0 + t v and satisfies <xi_new, v> > -c |v|^2.

    ``iterations`` counts interval updates, so a stop at the first midpoint
    has ``iterations == 0`` and ``j == 1``.
    """

    xi_new: np.ndarray
    t: float
    j: int
    state: BisectionState

    @property
    def iterations(self):
        return self.j - 1

    @property
    def steps(self):
        return self.state.steps


@dataclass(frozen=True)
class IntervalExhausted:
    """The interval shrank below resolution (or hit max_iter) without a stop."""

    j: int
    last_t: float
    state: BisectionState

    @property
    def iterations(self):
        return self.j

    @property
    def steps(self):
        return self.state.steps


def _norm(v):
    nv = float(np.linalg.norm(v))
    if nv == 0.0:
        raise InvalidArgument("direction v must be nonzero")
    return nv


def _scaled(like, *factors):
    # product of float factors, exact when the function values are rationals
    if isinstance(like, Fraction):
        out = Fraction(1)
        for f in factors:
            out *= Fraction(f)
        return out
    out = 1.0
    for f in factors:
        out *= f
    return out


def c_min(oracle, x0, eps, v, f0=None, f_end=None):
    """Largest c for which v satisfies the sufficient-descent test.

    -(f(x0 + eps/|v| v) - f(x0)) / (eps |v|). The direction violates the
    test for c iff ``c_min < c``.
    """
    x0 = as_vector(x0, "x0")
    v = as_vector(v, "v")
    if not eps > 0:
        raise InvalidArgument("eps must be positive")
    nv = _norm(v)
    if f0 is None:
        f0 = oracle.eval(x0)
    if f_end is None:
        f_end = oracle.eval(x0 + (eps / nv) * v)
    diff = f_end - f0
    return -diff / _scaled(diff, eps, nv)


def h_tilde(oracle, x0, v, c_tilde, t, f0=None):
    """f(x0 + t v) - f(x0) + c_tilde t |v|^2."""
    x0 = as_vector(x0, "x0")
    v = as_vector(v, "v")
    if f0 is None:
        f0 = oracle.eval(x0)
    if t == 0:
        return 0.0
    diff = oracle.eval(x0 + t * v) - f0
    return diff + _scaled(diff, c_tilde, t, float(v @ v))


def stops_eq8(inner, c, vv):
    """Stopping test <xi', v> > -c |v|^2."""
    return inner > -c * vv


def stops_eq11(inner, c, c_tilde, vv):
    """Same stop phrased via h_tilde: g = <xi', v> + c_tilde |v|^2 > (c_tilde - c) |v|^2."""
    return inner + c_tilde * vv > (c_tilde - c) * vv


def midpoint_c_tilde(cmin, c):
    """Default c_tilde: middle of (c_min, c)."""
    if isinstance(cmin, Fraction):
        return (cmin + Fraction(c)) / 2
    return 0.5 * (cmin + c)


def _run(oracle, x0, eps, c, v, c_tilde, cmin, f0, f_end, caps, callback):
    nv = float(np.linalg.norm(v))
    vv = float(v @ v)
    b1 = eps / nv
    width_min = caps.width_rel * b1
    slack = 1e-15 * max(1.0, b1)

    def h(t):
        diff = oracle.eval(x0 + t * v) - f0
        return diff + _scaled(diff, c_tilde, t, vv)

    h_b1 = (f_end - f0) + _scaled(f_end - f0, c_tilde, b1, vv)
    state = BisectionState(
        x0=x0, v=v, eps=eps, c=c, c_tilde=c_tilde, c_min=cmin, f0=f0,
        a=0.0, b=b1, t=0.5 * b1, j=1, h_a=0 * h_b1, h_b=h_b1,
    )
    if not state.h_a < state.h_b:
        raise BisectionInvariantError(f"h(a_1) = 0 must be < h(b_1) = {h_b1}")

    while True:
        t = state.t
        xi = oracle.subgrad(x0 + t * v)
        inner = float(xi @ v)
        state.steps.append(BisectionStep(state.j, state.a, state.b, t, inner))
        if callback is not None:
            callback(state.j, state.a, state.b, t, inner)
        if stops_eq8(inner, c, vv):
            return Found(xi_new=xi, t=t, j=state.j, state=state)

        width = state.b - state.a
        h_b_old = state.h_b
        h_t = h(t)
        if state.h_b > h_t:
            state.a, state.h_a = t, h_t
        else:
            state.b, state.h_b = t, h_t

        if not state.h_a < state.h_b:
            raise BisectionInvariantError(
                f"j={state.j}: h(a)={state.h_a!r} not < h(b)={state.h_b!r}"
            )
        if state.h_b < h_b_old:
            raise BisectionInvariantError(f"j={state.j}: h(b_j) decreased")
        if state.b - state.a > 0.5 * width + slack:
            raise BisectionInvariantError(f"j={state.j}: interval did not halve")

        state.j += 1
        state.t = 0.5 * (state.a + state.b)
        if state.b - state.a < width_min or state.j > caps.max_iter:
            return IntervalExhausted(j=state.j - 1, last_t=t, state=state)


def _prepare(oracle, x0, eps, v, f0, f_end):
    x0 = as_vector(x0, "x0")
    v = as_vector(v, "v")
    if v.shape != x0.shape:
        raise InvalidArgument("x0 and v must have the same dimension")
    if not eps > 0:
        raise InvalidArgument("eps must be positive")
    nv = _norm(v)
    if f0 is None:
        f0 = oracle.eval(x0)
    if f_end is None:
        f_end = oracle.eval(x0 + (eps / nv) * v)
    cmin = c_min(oracle, x0, eps, v, f0=f0, f_end=f_end)
    return x0, v, f0, f_end, cmin


def bisect_legacy(oracle, x0, eps, c, v, caps=None, callback=None, f0=None, f_end=None):
    """Classic bisection on h with the descent parameter c itself.

    Requires that v violates sufficient descent (c_min < c). May end in
    ``IntervalExhausted`` even for semismooth f. ``f0`` and ``f_end`` are
    optional cached values of f(x0) and f(x0 + eps/|v| v).
    """
    if not 0 < c < 1:
        raise InvalidArgument(f"c must lie in (0, 1), got {c}")
    x0, v, f0, f_end, cmin = _prepare(oracle, x0, eps, v, f0, f_end)
    if not cmin < c:
        raise InvalidArgument(
            f"direction already gives sufficient descent (c_min={cmin} >= c={c})"
        )
    return _run(oracle, x0, eps, c, v, c, cmin, f0, f_end, caps or BisectionCaps(), callback)


def bisect_improved(
    oracle, x0, eps, c, v, c_tilde=None, caps=None, callback=None, f0=None, f_end=None
):
    """Bisection on h_tilde with c_tilde in (c_min, c), stopping test with c.

    ``c_tilde=None`` picks the midpoint of (c_min, c). An ``IntervalExhausted``
    result means floating-point resolution ran out; it is returned, never
    swallowed.
    """
    if not 0 < c < 1:
        raise InvalidArgument(f"c must lie in (0, 1), got {c}")
    x0, v, f0, f_end, cmin = _prepare(oracle, x0, eps, v, f0, f_end)
    if not cmin < c:
        raise InvalidArgument(
            f"direction already gives sufficient descent (c_min={cmin} >= c={c})"
        )
    if c_tilde is None:
        c_tilde = midpoint_c_tilde(cmin, c)
    if not cmin < c_tilde < c:
        raise InvalidArgument(f"c_tilde={c_tilde} must lie in (c_min={cmin}, c={c})")
    return _run(oracle, x0, eps, c, v, c_tilde, cmin, f0, f_end, caps or BisectionCaps(), callback)
