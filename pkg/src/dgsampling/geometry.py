"""Volume fraction of the cone region D2 in the unit ball, and detection odds.

D2 = {x : x_n > |pr(x)|} meets the unit ball in a spherical sector of
half-angle pi/4 about the x_n axis. A sector of half-angle theta holds the
fraction ``I_{sin^2 theta}((n-1)/2, 1/2) / 2`` of the ball, with I the
regularized incomplete beta function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import InvalidArgument

TABLE1_DIMS = (2, 3, 5, 10, 20, 50, 100)

_CF_TOL = 1e-15
_CF_MAX_ITER = 10_000
_TINY = 1e-300


def _beta_cf(a, b, x):
    # modified Lentz evaluation of the incomplete beta continued fraction
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_TOL:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc(a, b, x):
    """Regularized incomplete beta function I_x(a, b) for a, b > 0, 0 <= x <= 1."""
    if a <= 0 or b <= 0:
        raise InvalidArgument("betainc needs a, b > 0")
    if not 0.0 <= x <= 1.0:
        raise InvalidArgument("betainc needs 0 <= x <= 1")
    if x == 0.0 or x == 1.0:
        return x
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


def sector_fraction(n, half_angle):
    """Fraction of the n-ball inside a cone of the given half-angle (<= pi/2)."""
    if n < 2:
        raise InvalidArgument(f"n >= 2 required, got {n}")
    if not 0.0 <= half_angle <= math.pi / 2:
        raise InvalidArgument("half_angle must lie in [0, pi/2]")
    return 0.5 * betainc((n - 1) / 2.0, 0.5, math.sin(half_angle) ** 2)


def d2_fraction(n):
    """V_n(D2 and unit ball) / V_n(unit ball)."""
    if int(n) != n or n < 2:
        raise InvalidArgument(f"n >= 2 required, got {n}")
    # sin^2(pi/4) is exactly 1/2
    return 0.5 * betainc((n - 1) / 2.0, 0.5, 0.5)


def detection_probability(n, m):
    """P(at least one of m uniform ball samples lands in D2) = 1 - (1 - p)^m."""
    if int(m) != m or m < 1:
        raise InvalidArgument(f"m >= 1 required, got {m}")
    p = d2_fraction(n)
    return -math.expm1(m * math.log1p(-p))


def ball_volume(n, r=1.0):
    """Volume of the n-dimensional Euclidean ball of radius r."""
    if n == 0:
        return 1.0
    return math.exp((n / 2.0) * math.log(math.pi) - math.lgamma(n / 2.0 + 1.0)) * r**n


@dataclass(frozen=True)
class ProbabilityRow:
    n: int
    p: float
    detect: float

    @property
    def m(self):
        return 2 * self.n


def display_round(value):
    """Round for display: 4 decimals above 1e-3, else 2 significant digits."""
    if value >= 1e-3:
        return round(value, 4)
    return float(f"{value:.1e}")


def table1(dims=TABLE1_DIMS):
    """Detection probabilities with m = 2n samples for each dimension."""
    rows = []
    for n in dims:
        rows.append(ProbabilityRow(n=n, p=d2_fraction(n), detect=detection_probability(n, 2 * n)))
    return rows
