import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import constants

from conicqed.config import DEFAULT_NUMERICS
from conicqed.errors import ConvergenceError, DomainError
from conicqed.opse import (
    MU_LIMIT,
    Orientation,
    StringBackground,
    deficit_angle,
    free_space_rate,
    golden_rule_direct,
    large_q_approx,
    mu_from_q,
    purcell_all,
    purcell_factor,
    purcell_for_dipole,
    q_from_mu,
    small_rho_asymptotic,
)

ALL = list(Orientation)
AXES = [Orientation.Z, Orientation.RHO, Orientation.PHI]


@pytest.mark.parametrize("keg_rho", [0.1, 1.0, 3.7, 5.0, 20.0])
@pytest.mark.parametrize("orient", ALL)
def test_free_space_recovery(orient, keg_rho):
    assert purcell_factor(orient, 1.0, keg_rho) == pytest.approx(1.0, abs=1e-8)


def test_on_the_string():
    for q in (1.0, 1.5, 3.0):
        factors = purcell_all(q, 0.0)
        assert factors.p_z == q
        assert factors.p_rho == factors.p_phi == (1.0 if q == 1.0 else 0.0)


@pytest.mark.parametrize("q", [1.5, 2.0, 2.5, 3.0])
def test_selection_rule_limit(q):
    factors = purcell_all(q, 1e-6)
    assert factors.p_z == pytest.approx(q, abs=1e-4)
    assert 0 <= factors.p_rho < 1e-6
    assert 0 <= factors.p_phi < 1e-6


@pytest.mark.parametrize("keg_rho", [0.005, 0.02, 0.05])
@pytest.mark.parametrize("q", [1.5, 2.5])
@pytest.mark.parametrize("orient", ALL)
def test_small_distance_expansion(orient, q, keg_rho):
    exact = purcell_factor(orient, q, keg_rho)
    assert abs(exact - small_rho_asymptotic(orient, q, keg_rho)) / q <= 1e-2


def test_small_distance_expansion_needs_a_string():
    with pytest.raises(DomainError):
        small_rho_asymptotic(Orientation.Z, 1.0, 0.01)


@pytest.mark.parametrize("q", [1.5, 2.0, 3.0])
def test_axial_factor_is_an_inverted_parabola_near_the_string(q):
    grid = np.linspace(0.01, 0.3, 30)
    values = np.array([purcell_factor(Orientation.Z, q, x) for x in grid])
    assert np.all(np.diff(values) < 0)
    for x, value in zip(grid, values):
        if x <= 0.1:
            assert value == pytest.approx(q * (1.0 - 0.4 * x * x), rel=1e-2)


@pytest.mark.parametrize("keg_rho", [1.0, 5.0, 15.0])
@pytest.mark.parametrize("q", [1.5, 2.5])
def test_truncation_is_sound(q, keg_rho):
    tight = DEFAULT_NUMERICS.with_overrides(rel_tol=1e-16, consecutive_small=10)
    reference = purcell_all(q, keg_rho, tight)
    default = purcell_all(q, keg_rho)
    for got, want in zip(default.frame_vector(), reference.frame_vector()):
        assert abs(got - want) <= 2e-10 * abs(want)


@pytest.mark.parametrize("q, keg_rho", [(6, 1), (8, 3), (10, 2), (12, 5), (20, 2), (20, 10)])
@pytest.mark.parametrize("orient", ALL)
def test_large_q_collapse(orient, q, keg_rho):
    exact = purcell_factor(orient, q, keg_rho)
    assert abs(exact - large_q_approx(orient, q, keg_rho)) / exact <= 1e-4


def test_large_q_transverse_orientations_differ():
    assert large_q_approx(Orientation.RHO, 10.0, 2.0) != pytest.approx(large_q_approx(Orientation.PHI, 10.0, 2.0))


@pytest.mark.parametrize("keg_rho", [20.0, 25.0, 30.0])
@pytest.mark.parametrize("q", [2.0, 3.0])
@pytest.mark.parametrize("orient", ALL)
def test_large_distance_approaches_free_space(orient, q, keg_rho):
    assert abs(purcell_factor(orient, q, keg_rho) - 1.0) <= 5.0 / keg_rho


def test_shared_kernel_is_bit_identical():
    factors = purcell_all(2.5, 3.3)
    assert purcell_factor(Orientation.Z, 2.5, 3.3) == factors.p_z
    assert purcell_factor(Orientation.RHO, 2.5, 3.3) == factors.p_rho
    assert purcell_factor(Orientation.PHI, 2.5, 3.3) == factors.p_phi
    assert purcell_factor(Orientation.ISO, 2.5, 3.3) == factors.p_iso
    assert factors.p_iso == pytest.approx((factors.p_z + factors.p_rho + factors.p_phi) / 3)


def test_string_orientation_names_are_accepted():
    assert purcell_factor("z", 2.0, 1.0) == purcell_factor(Orientation.Z, 2.0, 1.0)
    with pytest.raises(DomainError):
        purcell_factor("x", 2.0, 1.0)


@pytest.mark.parametrize(
    "q, keg_rho", [(0.5, 1.0), (float("nan"), 1.0), (2.0, -1.0), (2.0, float("inf"))]
)
def test_domain_errors(q, keg_rho):
    with pytest.raises(DomainError):
        purcell_factor(Orientation.Z, q, keg_rho)


def test_truncation_cap_raises():
    cfg = DEFAULT_NUMERICS.with_overrides(m_max=3, rel_tol=1e-14)
    with pytest.raises(ConvergenceError) as info:
        purcell_factor(Orientation.Z, 1.0, 20.0, cfg)
    assert info.value.report is not None and not info.value.report.converged
    assert info.value.context["keg_rho"] == 20.0


@given(st.floats(min_value=1.0, max_value=4.0), st.floats(min_value=0.0, max_value=15.0))
@settings(max_examples=30, deadline=None)
def test_rates_are_non_negative(q, keg_rho):
    factors = purcell_all(q, keg_rho)
    assert min(factors.p_z, factors.p_rho, factors.p_phi) >= -1e-12


def test_node_refinement_is_stable():
    fine = DEFAULT_NUMERICS.with_overrides(nodes=256)
    for orient in AXES:
        assert purcell_factor(orient, 1.7, 12.0) == pytest.approx(purcell_factor(orient, 1.7, 12.0, fine), abs=1e-11)


def test_arbitrary_dipole():
    factors = purcell_all(2.0, 1.5)
    assert purcell_for_dipole([0, 0, 1], 2.0, 1.5) == pytest.approx(factors.p_z)
    assert purcell_for_dipole([1j, 0, 0], 2.0, 1.5) == pytest.approx(factors.p_rho)
    assert purcell_for_dipole([1, 1, 1], 2.0, 1.5) == pytest.approx(factors.p_iso)
    with pytest.raises(DomainError):
        purcell_for_dipole([0, 0, 0], 2.0, 1.5)
    np.testing.assert_array_equal(factors.frame_vector(), [factors.p_rho, factors.p_phi, factors.p_z])


def test_free_space_rate_scaling():
    base = free_space_rate(1e-58, 1e15)
    expected = 1e-58 * 1e45 / (3 * math.pi * constants.epsilon_0 * constants.hbar * constants.c ** 3)
    assert base == pytest.approx(expected, rel=1e-12)
    assert free_space_rate(1e-58, 2e15) == pytest.approx(8 * base, rel=1e-12)
    assert free_space_rate(0.0, 1e15) == 0.0
    with pytest.raises(DomainError):
        free_space_rate(1e-58, 0.0)


def test_string_tension_conversions():
    assert q_from_mu(0.0) == 1.0
    assert q_from_mu(MU_LIMIT / 2) == pytest.approx(2.0, rel=1e-14)
    assert q_from_mu(mu_from_q(1.5)) == pytest.approx(1.5, rel=1e-12)
    with pytest.raises(DomainError):
        q_from_mu(MU_LIMIT)
    with pytest.raises(DomainError):
        q_from_mu(-1.0)


def test_deficit_angle():
    assert deficit_angle(1.0) == 0.0
    assert deficit_angle(2.0) == pytest.approx(math.pi)
    string = StringBackground.from_mu(MU_LIMIT / 2)
    assert string.q == pytest.approx(2.0)
    assert string.deficit_angle == pytest.approx(8 * math.pi * constants.G * string.mu / constants.c ** 2)
    with pytest.raises(DomainError):
        StringBackground(0.9)


@pytest.mark.slow
@pytest.mark.parametrize("q, keg_rho", [(1.5, 2.0), (2.5, 4.0)])
@pytest.mark.parametrize("orient", AXES)
def test_direct_golden_rule(orient, q, keg_rho):
    assert golden_rule_direct(orient, q, keg_rho) == pytest.approx(purcell_factor(orient, q, keg_rho), abs=1e-6)


@pytest.mark.slow
def test_direct_golden_rule_free_space():
    assert golden_rule_direct(Orientation.ISO, 1.0, 3.0) == pytest.approx(1.0, abs=1e-6)
