import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import jv, jvp

from conicqed.config import BesselConfig
from conicqed.errors import DomainError
from conicqed.specfun import bessel_j, bessel_j_ladder, bessel_j_oracle, bessel_j_prime

orders = st.floats(min_value=0.0, max_value=50.0, allow_nan=False, allow_infinity=False)
# scipy underflows to 0 for subnormal arguments where the series is still well above 1e-10
arguments = st.one_of(st.just(0.0), st.floats(min_value=1e-300, max_value=50.0, allow_nan=False, allow_infinity=False))


@given(orders, arguments)
@settings(max_examples=300, deadline=None)
def test_matches_scipy(nu, x):
    assert bessel_j(nu, x) == pytest.approx(jv(nu, x), abs=1e-10)


@pytest.mark.parametrize("x", [0.3, 5.0, 12.0, 12.5, 30.0, 49.0])
@pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 2.4, 7.5, 35.25])
def test_both_sides_of_series_threshold(nu, x):
    assert bessel_j(nu, x) == pytest.approx(jv(nu, x), abs=1e-12, rel=1e-10)


def test_zero_argument():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(2.5, 0.0) == 0.0
    assert bessel_j(-3, 0.0) == 0.0


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_negative_integer_reflection(n):
    assert bessel_j(-n, 3.3) == pytest.approx((-1) ** n * bessel_j(n, 3.3), abs=1e-15)


@pytest.mark.parametrize(
    "order, x",
    [(-0.5, 1.0), (float("nan"), 1.0), (1.0, float("inf")), (1.0, -2.0), (float("inf"), 1.0)],
)
def test_rejects_bad_input(order, x):
    with pytest.raises(DomainError):
        bessel_j(order, x)


def test_ladder_shape_and_values():
    x = np.array([[0.5, 3.0, 11.0], [13.0, 25.0, 40.0]])
    ladder = bessel_j_ladder(1.5, 4, x)
    assert ladder.shape == (4, 2, 3)
    for k in range(4):
        np.testing.assert_allclose(ladder[k], jv(1.5 + k, x), atol=1e-12, rtol=1e-10)


def test_ladder_rejects_negative_base():
    with pytest.raises(DomainError):
        bessel_j_ladder(-1.0, 3, np.array([1.0]))


def test_custom_threshold_agrees():
    series_only = BesselConfig(series_arg_threshold=1e-3)
    for x in (2.0, 8.0):
        assert bessel_j(3.7, x, series_only) == pytest.approx(bessel_j(3.7, x), abs=1e-12)


def test_subnormal_argument_keeps_leading_power():
    nu, x = 0.03125, 2.225073858507203e-309
    expected = math.exp(nu * math.log(x / 2) - math.lgamma(1 + nu))
    assert bessel_j(nu, x) == pytest.approx(expected, rel=1e-13)


def test_tolerances_control_series_truncation():
    loose = BesselConfig(abs_tol=1e-3, rel_tol=1e-3)
    value = bessel_j(0.5, 3.0, loose)
    assert value != bessel_j(0.5, 3.0)
    assert abs(value - jv(0.5, 3.0)) <= 1e-3 + 1e-3 * abs(jv(0.5, 3.0))


def test_loose_tolerances_stay_accurate_on_recurrence_side():
    loose = BesselConfig(abs_tol=1e-3, rel_tol=1e-3)
    for nu, x in ((0.5, 30.0), (4.2, 45.0)):
        assert abs(bessel_j(nu, x, loose) - jv(nu, x)) <= 1e-3 + 1e-3 * abs(jv(nu, x))


@pytest.mark.parametrize("nu", [10.0, 17.5, 30.0, 50.0])
@pytest.mark.parametrize("ratio", [0.05, 0.2, 0.35, 0.5])
def test_large_order_decay_bound(nu, ratio):
    # |J_nu(x)| <= (e x / 2 nu)^nu / sqrt(2 pi nu), compared in logs
    x = ratio * nu
    value = bessel_j(nu, x)
    assert value > 0
    bound = nu + nu * math.log(x / (2 * nu)) - 0.5 * math.log(2 * math.pi * nu)
    assert math.log(value) <= bound + math.log(1.01)


def test_derivative_finite_difference():
    h = 1e-5
    fd = (bessel_j(1.5, 2.0 + h) - bessel_j(1.5, 2.0 - h)) / (2 * h)
    assert bessel_j_prime(1.5, 2.0) == pytest.approx(fd, abs=1e-6)


@pytest.mark.parametrize("nu", [0.0, 0.5, 0.75, 1.0, 3.2])
def test_derivative_against_scipy(nu):
    assert bessel_j_prime(nu, 4.1) == pytest.approx(jvp(nu, 4.1), abs=1e-12)


def test_derivative_needs_positive_argument():
    with pytest.raises(DomainError):
        bessel_j_prime(1.0, 0.0)


@pytest.mark.parametrize("x", [0.5, 1.0, 5.0, 12.0, 17.3, 30.0])
def test_sum_identities(x):
    top = int(x) + 40
    ladder = bessel_j_ladder(0.0, top + 2, np.array([x]))[:, 0]
    squares = ladder[0] ** 2 + 2.0 * np.sum(ladder[1 : top + 1] ** 2)
    crosses = -ladder[1] ** 2 + 2.0 * np.sum(ladder[2 : top + 2] * ladder[0:top])
    assert abs(squares - 1.0) < 1e-10
    assert abs(crosses) < 1e-10


def test_oracle_example():
    assert bessel_j_oracle(2.4, 11.7) == pytest.approx(bessel_j(2.4, 11.7), abs=1e-10)


def test_oracle_integer_and_edge_orders():
    assert bessel_j_oracle(3.0, 7.0) == pytest.approx(jv(3, 7.0), abs=1e-12)
    assert bessel_j_oracle(0.0, 0.0) == 1.0
    with pytest.raises(DomainError):
        bessel_j_oracle(-1.0, 2.0)


@pytest.mark.slow
def test_oracle_grid():
    worst = 0.0
    for nu in np.linspace(0.0, 50.0, 50):
        for x in np.linspace(0.0, 50.0, 50):
            worst = max(worst, abs(bessel_j(nu, x) - bessel_j_oracle(nu, x)))
    assert worst <= 1e-10


@given(st.floats(min_value=0.0, max_value=20.0), st.floats(min_value=0.1, max_value=40.0))
@settings(max_examples=100, deadline=None)
def test_three_term_recurrence(nu, x):
    lhs = bessel_j(nu, x) + bessel_j(nu + 2.0, x)
    rhs = 2.0 * (nu + 1.0) / x * bessel_j(nu + 1.0, x)
    assert lhs == pytest.approx(rhs, abs=1e-10 * max(1.0, math.fabs(rhs)))
