"""Test functions with exact values and designated subgradients.

* ``counterexample``: 1-D piecewise linear function f(x) = phi(x) - x/2 on
  which the classic bisection never stops.
* ``cone:<n>``: f(x) = |x_n - |pr(x)|| + x_n/2, with pr(x) the first n-1
  coordinates. x = 0 is critical, but only the thin region
  D2 = {x_n > |pr(x)|} contributes the gradients that prove it.
* ``abs``, ``maxnorm:<n>``, ``maxquad``: classic convex nonsmooth functions.

Every oracle returns one fixed element of the Clarke subdifferential, so runs
are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import FunctionOracle, InvalidArgument

# Counterexample breakpoints, i = 0, 1, 2, ...
#   x1(i) = 1 - 7 * 2^(-i-3),  phi1(i) = 1 - 9 * 2^(-2i-3)
#   x2(i) = 1 - 5 * 2^(-i-3),  phi2(i) = 1 - 3 * 2^(-2i-4)
# phi rises on [x1(i), x2(i)] with slope 15 * 2^(-i-2) and falls on
# [x2(i), x1(i+1)] with slope -2^(-i-1). Breakpoints and slopes are exact in
# double precision; the values phi1/phi2 need 2i + 4 bits and are only exact
# in float for small i, hence phi_exact.
PHI_MAX_INDEX = 52


def x1(i):
    return 1.0 - math.ldexp(7.0, -i - 3)


def x2(i):
    return 1.0 - math.ldexp(5.0, -i - 3)


def phi1(i):
    return 1.0 - math.ldexp(9.0, -2 * i - 3)


def phi2(i):
    return 1.0 - math.ldexp(3.0, -2 * i - 4)


def rising_slope(i):
    return math.ldexp(15.0, -i - 2)


def falling_slope(i):
    return -math.ldexp(1.0, -i - 1)


@dataclass(frozen=True)
class Segment:
    """Linear piece of phi containing x, as a half-open interval [left, right)."""

    kind: str  # "left", "initial", "rising", "falling", "flat"
    index: int
    left: float
    slope: float
    value_at_left: float


def phi_segment(x):
    """Locate the linear piece of phi whose half-open interval holds x."""
    x = float(x)
    if x < 0.0:
        return Segment("left", -1, -math.inf, -0.5, math.inf)
    if x >= 1.0:
        return Segment("flat", -1, 1.0, 0.0, 1.0)
    if x < x1(0):
        return Segment("initial", -1, 0.0, -1.0, 0.0)
    # x in [x1(i), x1(i+1)) iff 7*2^(-i-4) < 1 - x <= 7*2^(-i-3)
    i = int(math.floor(math.log2(7.0 / (1.0 - x)))) - 3
    i = min(max(i, 0), PHI_MAX_INDEX)
    while i > 0 and x < x1(i):
        i -= 1
    while i < PHI_MAX_INDEX and x >= x1(i + 1):
        i += 1
    if x < x2(i):
        return Segment("rising", i, x1(i), rising_slope(i), phi1(i))
    return Segment("falling", i, x2(i), falling_slope(i), phi2(i))


def phi_eval(x):
    """The piecewise linear function phi."""
    x = float(x)
    if x < 0.0:
        return -0.5 * x
    seg = phi_segment(x)
    return seg.value_at_left + seg.slope * (x - seg.left)


def phi_slope(x):
    """Right-hand derivative of phi at x (the designated subgradient of phi)."""
    return phi_segment(x).slope


def phi_exact(x):
    """phi(x) as an exact rational (x is converted exactly from its float)."""
    x = float(x)
    q = Fraction(x)
    if x < 0.0:
        return -q / 2
    seg = phi_segment(x)
    if seg.kind == "flat":
        return Fraction(1)
    if seg.kind == "initial":
        return -q
    i = seg.index
    if seg.kind == "rising":
        left, base = 1 - Fraction(7, 2 ** (i + 3)), 1 - Fraction(9, 2 ** (2 * i + 3))
    else:
        left, base = 1 - Fraction(5, 2 ** (i + 3)), 1 - Fraction(3, 2 ** (2 * i + 4))
    return base + Fraction(seg.slope) * (q - left)


def _counter_value(x):
    t = float(x[0])
    return phi_eval(t) - 0.5 * t


def _counter_value_exact(x):
    t = float(x[0])
    return phi_exact(t) - Fraction(t) / 2


def _counter_grad(x):
    t = float(x[0])
    if t == 0.0:
        # left slope; df(0) = [-3/2, -1]
        return np.array([-1.0])
    return np.array([phi_slope(t) - 0.5])


def counterexample_oracle(exact=True):
    """f(x) = phi(x) - x/2 on R.

    With ``exact=True`` values are ``Fraction``s. Near x = 1 the values
    1 - O(4^-i) stop being representable in double precision around
    i = 27, which would let rounding ties steer a bisection.
    """
    value = _counter_value_exact if exact else _counter_value
    return FunctionOracle(value, _counter_grad, name="counterexample", dim=1)


def counterexample_subdifferential(t):
    """Clarke subdifferential of the counterexample at t as an interval (lo, hi)."""
    t = float(t)
    right = phi_slope(t) - 0.5
    if t == 0.0:
        return (-1.5, -1.0)
    if t == 1.0:
        return (-0.5, -0.5)
    # left-hand slope: slope of the piece just below t
    left = phi_slope(np.nextafter(t, -np.inf)) - 0.5
    return (min(left, right), max(left, right))


class ConeFunction:
    """f(x) = |x_n - |pr(x)|| + x_n / 2 in dimension n >= 2."""

    def __init__(self, n):
        if int(n) != n or n < 2:
            raise InvalidArgument(f"cone function needs n >= 2, got {n}")
        self.n = int(n)

    def value(self, x):
        r = np.linalg.norm(x[:-1])
        return float(abs(x[-1] - r) + 0.5 * x[-1])

    def grad(self, x):
        p = x[:-1]
        r = np.linalg.norm(p)
        g = np.empty(self.n)
        if r == 0.0:
            # D2-side limit (0, ..., 0, 3/2) where D2 touches x (x_n >= 0);
            # below the axis only D1 is nearby, giving (0, ..., 0, -1/2)
            g[:-1] = 0.0
            g[-1] = 1.5 if x[-1] >= 0.0 else -0.5
        elif x[-1] < r:
            g[:-1] = p / r
            g[-1] = -0.5
        else:
            g[:-1] = -p / r
            g[-1] = 1.5
        return g

    def region(self, x):
        """1 for D1, 2 for D2, 0 on the nonsmooth set."""
        x = np.asarray(x, dtype=float)
        r = np.linalg.norm(x[:-1])
        if r == 0.0 or x[-1] == r:
            return 0
        return 1 if x[-1] < r else 2

    def oracle(self):
        return FunctionOracle(self.value, self.grad, name=f"cone:{self.n}", dim=self.n)


def cone_oracle(n):
    return ConeFunction(n).oracle()


def in_cone_subdifferential(x, g, atol=1e-12):
    """Membership of g in the Clarke subdifferential of the cone function at x."""
    x = np.asarray(x, dtype=float)
    g = np.asarray(g, dtype=float)
    p, xn = x[:-1], x[-1]
    gp, gn = g[:-1], g[-1]
    r = np.linalg.norm(p)
    if r == 0.0:
        ball = np.linalg.norm(gp)
        if xn > 0:
            return abs(gn - 1.5) <= atol and ball <= 1 + atol
        if xn < 0:
            return abs(gn + 0.5) <= atol and ball <= 1 + atol
        # conv of {(u, -1/2), (-u, 3/2) : |u| = 1}: last coordinate 3/2 s - 1/2 (1 - s),
        # first block within the ball of radius 1
        s = (gn + 0.5) / 2.0
        return -atol <= s <= 1 + atol and ball <= 1 + atol
    u = p / r
    g1 = np.append(u, -0.5)
    g2 = np.append(-u, 1.5)
    if xn < r:
        return np.allclose(g, g1, atol=atol)
    if xn > r:
        return np.allclose(g, g2, atol=atol)
    # on the kink: segment between g1 and g2
    s = (gn + 0.5) / 2.0
    return -atol <= s <= 1 + atol and np.allclose(g, (1 - s) * g1 + s * g2, atol=atol)


def _abs_value(x):
    return float(abs(x[0]))


def _abs_grad(x):
    return np.array([1.0 if x[0] >= 0.0 else -1.0])


def abs_oracle():
    return FunctionOracle(_abs_value, _abs_grad, name="abs", dim=1)


def maxnorm_oracle(n):
    """|x|_inf; subgradient is sign(x_i) e_i for the lowest attaining index i."""
    if int(n) != n or n < 1:
        raise InvalidArgument(f"maxnorm needs n >= 1, got {n}")
    n = int(n)

    def value(x):
        return float(np.max(np.abs(x)))

    def grad(x):
        i = int(np.argmax(np.abs(x)))
        g = np.zeros(n)
        g[i] = 1.0 if x[i] >= 0.0 else -1.0
        return g

    return FunctionOracle(value, grad, name=f"maxnorm:{n}", dim=n)


# max_i |x - p_i|^2 for an acute triangle: minimized at the circumcenter
MAXQUAD_CENTERS = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.5]])
MAXQUAD_ARGMIN = np.array([0.0, 5.0 / 12.0])
MAXQUAD_MIN = 169.0 / 144.0


def _maxquad_value(x):
    d = x - MAXQUAD_CENTERS
    return float(np.max(np.einsum("ij,ij->i", d, d)))


def _maxquad_grad(x):
    d = x - MAXQUAD_CENTERS
    i = int(np.argmax(np.einsum("ij,ij->i", d, d)))
    return 2.0 * d[i]


def maxquad_oracle():
    return FunctionOracle(_maxquad_value, _maxquad_grad, name="maxquad", dim=2)


@dataclass(frozen=True)
class Known:
    oracle: FunctionOracle
    argmin: np.ndarray
    fmin: float


def classic_oracles(maxnorm_dim=5):
    """Convex test problems with known minimizers, keyed by CLI name."""
    return {
        "abs": Known(abs_oracle(), np.zeros(1), 0.0),
        f"maxnorm:{maxnorm_dim}": Known(maxnorm_oracle(maxnorm_dim), np.zeros(maxnorm_dim), 0.0),
        "maxquad": Known(maxquad_oracle(), MAXQUAD_ARGMIN.copy(), MAXQUAD_MIN),
    }


FUNCTION_NAMES = ("counterexample", "cone:<n>", "abs", "maxnorm:<n>", "maxquad")


def get_oracle(name):
    """Resolve a CLI function name such as ``cone:10`` to an oracle."""
    base, _, arg = name.partition(":")
    if base in ("cone", "maxnorm"):
        try:
            n = int(arg)
        except ValueError:
            raise InvalidArgument(f"{base} needs an integer dimension, e.g. {base}:5") from None
        return cone_oracle(n) if base == "cone" else maxnorm_oracle(n)
    if arg:
        raise InvalidArgument(f"unknown function {name!r}")
    makers = {"counterexample": counterexample_oracle, "abs": abs_oracle, "maxquad": maxquad_oracle}
    if base not in makers:
        raise InvalidArgument(f"unknown function {name!r}; choose from {', '.join(FUNCTION_NAMES)}")
    return makers[base]()
