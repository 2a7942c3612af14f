from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import qmc

from dgsampling.core import InvalidArgument
from dgsampling.testfns import (
    MAXQUAD_ARGMIN,
    MAXQUAD_MIN,
    ConeFunction,
    classic_oracles,
    cone_oracle,
    counterexample_oracle,
    counterexample_subdifferential,
    falling_slope,
    get_oracle,
    in_cone_subdifferential,
    maxnorm_oracle,
    phi1,
    phi2,
    phi_eval,
    phi_exact,
    phi_segment,
    phi_slope,
    rising_slope,
    x1,
    x2,
)
from oracles import phi_linear_scan


@pytest.mark.parametrize(
    "x, expected", [(0.0, 0.0), (1 / 8, -1 / 8), (2.0, 1.0), (11 / 16, 61 / 64), (-2.0, 1.0)]
)
def test_phi_values(x, expected):
    assert phi_eval(x) == expected
    assert phi_exact(x) == Fraction(expected)


def test_breakpoint_closed_forms_exact():
    # 1 - 7 * 2^(-i-3) needs i + 3 fractional bits
    for i in range(49):
        assert Fraction(x1(i)) == 1 - Fraction(7, 2 ** (i + 3))
        assert Fraction(x2(i)) == 1 - Fraction(5, 2 ** (i + 3))
    # phi values 1 - O(4^-i) stay exact doubles up to i = 24
    for i in range(25):
        assert Fraction(phi1(i)) == 1 - Fraction(9, 2 ** (2 * i + 3))
        assert Fraction(phi2(i)) == 1 - Fraction(3, 2 ** (2 * i + 4))


def test_breakpoint_ordering():
    for i in range(48):
        assert x1(i) < x2(i) < x1(i + 1)
    for i in range(24):
        assert phi1(i) < phi2(i)
        assert phi2(i) > phi1(i + 1)


def test_slope_identities():
    for i in range(48):
        mid_rise = 0.5 * (x1(i) + x2(i))
        mid_fall = 0.5 * (x2(i) + x1(i + 1))
        assert phi_slope(mid_rise) == rising_slope(i) == 15 * 2.0 ** (-i - 2)
        assert phi_slope(mid_fall) == falling_slope(i) == -(2.0 ** (-i - 1))
        # segment endpoints reproduce the slopes exactly in rationals
        rise = (Fraction(phi2(i)) - Fraction(phi1(i))) / (Fraction(x2(i)) - Fraction(x1(i)))
        if i < 24:
            assert rise == Fraction(rising_slope(i))


def test_locator_on_breakpoints_is_right_continuous():
    for i in range(49):
        s = phi_segment(x1(i))
        assert (s.kind, s.index) == ("rising", i)
        s = phi_segment(x2(i))
        assert (s.kind, s.index) == ("falling", i)


def test_locator_matches_linear_scan():
    pts = qmc.Sobol(d=1, scramble=True, seed=3).random_base2(20)[:, 0]
    # add points crowding toward 1, where the breakpoints accumulate
    k = np.arange(1, 56)
    near_one = 1 - np.outer(2.0 ** -k, np.linspace(0.01, 0.99, 50)).ravel()
    x = np.concatenate([pts, near_one])
    x = x[(x >= 0) & (x < 1)]
    ours = np.fromiter((phi_eval(t) for t in x), float, len(x))
    np.testing.assert_allclose(ours, phi_linear_scan(x), rtol=0, atol=1e-12)


@given(st.floats(-4, 4))
def test_exact_values_agree_with_float(x):
    assert abs(float(phi_exact(x)) - phi_eval(x)) <= 1e-15


def test_counterexample_subgradients():
    f = counterexample_oracle()
    assert f.subgrad(np.array([0.0]))[0] == -1.0
    assert f.subgrad(np.array([5 / 8]))[0] == 11 / 8
    for j in range(1, 45):
        assert f.subgrad(np.array([1 - 2.0**-j]))[0] == -(2.0**-j) - 0.5
    assert f.subgrad(np.array([7 / 8]))[0] == -5 / 8
    assert counterexample_subdifferential(0.0) == (-1.5, -1.0)


def test_counterexample_subgradient_in_interval():
    f = counterexample_oracle()
    for t in [x1(0), x2(0), x1(3), x2(5), 0.3, -1.0, 1.0, 1.5]:
        lo, hi = counterexample_subdifferential(t)
        assert lo <= f.subgrad(np.array([t]))[0] <= hi


def test_counterexample_values():
    f = counterexample_oracle()
    assert f.eval(np.array([0.0])) == 0
    assert f.eval(np.array([1.0])) == Fraction(1, 2)
    assert isinstance(f.eval(np.array([0.3])), Fraction)
    assert counterexample_oracle(exact=False).eval(np.array([1.0])) == 0.5


def test_cone_examples():
    f = cone_oracle(4)
    np.testing.assert_array_equal(f.subgrad(np.array([1.0, 0, 0, -1])), [1.0, 0, 0, -0.5])
    assert f.eval(np.zeros(4)) == 0.0
    assert f.eval(np.array([0.0, 0, 0, 1])) == 1.5
    np.testing.assert_array_equal(f.subgrad(np.array([0.0, 0, 0, 1])), [0, 0, 0, 1.5])
    np.testing.assert_array_equal(f.subgrad(np.zeros(4)), [0, 0, 0, 1.5])
    np.testing.assert_array_equal(f.subgrad(np.array([0.0, 0, 0, -1])), [0, 0, 0, -0.5])


def test_cone_rejects_small_dimension():
    with pytest.raises(InvalidArgument):
        ConeFunction(1)


@given(st.integers(2, 6).flatmap(
    lambda n: st.lists(st.sampled_from([-1.0, -0.5, 0.0, 0.5, 1.0, 0.3]), min_size=n, max_size=n)
))
def test_cone_subgradients_valid(x):
    x = np.array(x)
    f = ConeFunction(len(x))
    assert in_cone_subdifferential(x, f.grad(x))


def test_cone_kink_subgradient_valid():
    f = ConeFunction(3)
    x = np.array([0.6, 0.8, 1.0])  # x_n = |pr(x)|
    assert f.region(x) == 0
    assert in_cone_subdifferential(x, f.grad(x))


def test_classic_oracles():
    known = classic_oracles()
    assert known["abs"].oracle.subgrad(np.zeros(1))[0] == 1.0
    np.testing.assert_array_equal(maxnorm_oracle(2).subgrad(np.array([3.0, -3.0])), [1.0, 0.0])
    for k in known.values():
        assert k.oracle.eval(k.argmin) == pytest.approx(k.fmin, abs=1e-15)


def test_maxquad_grid():
    f = get_oracle("maxquad")
    g = np.arange(-0.5, 1.0, 1e-3)
    X, Y = np.meshgrid(g, g)
    vals = np.max([(X - a) ** 2 + (Y - b) ** 2 for a, b in [(1, 0), (-1, 0), (0, 1.5)]], axis=0)
    k = np.unravel_index(np.argmin(vals), vals.shape)
    np.testing.assert_allclose([X[k], Y[k]], MAXQUAD_ARGMIN, atol=2e-3)
    assert vals.min() >= MAXQUAD_MIN - 1e-12
    assert f.eval(MAXQUAD_ARGMIN) == pytest.approx(MAXQUAD_MIN, abs=1e-15)


@pytest.mark.parametrize("name", ["nosuch", "cone:x", "abs:3", "cone:1"])
def test_get_oracle_errors(name):
    with pytest.raises(InvalidArgument):
        get_oracle(name)
