import numpy as np
import pandas as pd
import pytest
from hypothesis import assume, given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from conicqed.errors import DomainError, ResonanceError
from conicqed.opse import Orientation, purcell_all, purcell_factor
from conicqed.tpse import (
    DTensor,
    IntermediateLevel,
    LevelScheme,
    d_isotropy_ratio,
    d_tensor,
    gamma0_free,
    small_rho_spectral_asymptotic,
    spectral_density,
    spectral_enhancement_general,
    spectral_enhancement_ss,
    spectrum,
    total_rate_ratio,
)

FRACS = np.arange(1, 100) / 100.0


def test_isotropic_scheme_gives_delta_weight():
    scheme = LevelScheme.isotropic(1.0, omega_m=2.0)
    ratio = d_isotropy_ratio(d_tensor(scheme, 0.3, 0.7))
    np.testing.assert_allclose(ratio, np.eye(3) / 3, atol=1e-15)


@pytest.mark.parametrize("f", [0.1, 0.35, 0.5, 0.8])
def test_general_matches_ss_on_isotropic_scheme(f):
    scheme = LevelScheme.isotropic(1.0, omega_m=1.7)
    general = spectral_enhancement_general(2.5, 3.0, f, scheme)
    assert general == pytest.approx(spectral_enhancement_ss(2.5, 3.0, f), abs=1e-12)


def test_single_axis_scheme():
    scheme = LevelScheme.single_axis(1.0, omega_m=1.5, axis=2)
    value = spectral_enhancement_general(2.0, 2.0, 0.3, scheme)
    expected = purcell_factor(Orientation.Z, 2.0, 0.6) * purcell_factor(Orientation.Z, 2.0, 1.4)
    assert value == pytest.approx(expected, rel=1e-12)


def test_resonance_is_reported():
    scheme = LevelScheme(1.0, [IntermediateLevel(0.5, [0, 0, 1], [0, 0, 1]), IntermediateLevel(0.4, [1, 0, 0], [1, 0, 0])])
    with pytest.raises(ResonanceError) as info:
        d_tensor(scheme, 0.4, 0.6)
    assert info.value.level_index == 1
    with pytest.raises(ResonanceError):
        spectral_enhancement_general(1.5, 1.0, 0.6, scheme)


def test_zero_tensor_rejected():
    scheme = LevelScheme(1.0, [IntermediateLevel(2.0, [0, 0, 0], [0, 0, 1])])
    with pytest.raises(DomainError):
        d_isotropy_ratio(d_tensor(scheme, 0.2, 0.8))


def test_scheme_validation():
    with pytest.raises(DomainError):
        LevelScheme(0.0, [IntermediateLevel(2.0, [0, 0, 1], [0, 0, 1])])
    with pytest.raises(DomainError):
        LevelScheme(1.0, [])


@given(arrays(np.complex128, (3, 3), elements=st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)))
@settings(max_examples=50)
def test_isotropy_ratio_is_normalized(entries):
    d = DTensor(entries, 0.3, 0.7)
    assume(d.norm_sq > 1e-100)
    assert np.sum(d_isotropy_ratio(d)) == pytest.approx(1.0, abs=1e-12)


def test_gamma0_free():
    assert gamma0_free(2.0, 0.3, 1.0) == pytest.approx(gamma0_free(2.0, 0.7, 1.0), rel=1e-12)
    assert gamma0_free(2.0, 0.0, 1.0) == 0.0
    assert gamma0_free(2.0, 1.0, 1.0) == 0.0
    assert gamma0_free(4.0, 0.3, 1.0) == pytest.approx(2 * gamma0_free(2.0, 0.3, 1.0))
    with pytest.raises(DomainError):
        gamma0_free(1.0, 1.2, 1.0)
    with pytest.raises(DomainError):
        gamma0_free(1.0, -0.1, 1.0)


@pytest.mark.parametrize("keg_rho", [0.5, 2.0, 7.0])
def test_free_space_enhancement(keg_rho):
    for f in (0.1, 0.5, 0.77):
        assert spectral_enhancement_ss(1.0, keg_rho, f) == pytest.approx(1.0, abs=1e-8)
    assert total_rate_ratio(1.0, keg_rho) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("keg_rho", [2.0, 4.0, 10.0])
@pytest.mark.parametrize("q", [1.5, 2.5])
def test_exchange_symmetry(q, keg_rho):
    values = np.array([spectral_enhancement_ss(q, keg_rho, f) for f in FRACS])
    assert np.max(np.abs(values - values[::-1])) <= 1e-12


@pytest.mark.parametrize("keg_rho", [0.7, 3.0, 9.0])
@pytest.mark.parametrize("q", [1.0, 1.5, 2.5])
def test_midpoint_is_mean_square_of_one_photon_factors(q, keg_rho):
    factors = purcell_all(q, keg_rho / 2)
    expected = (factors.p_rho ** 2 + factors.p_phi ** 2 + factors.p_z ** 2) / 3.0
    assert spectral_enhancement_ss(q, keg_rho, 0.5) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("q", [1.5, 2.0, 2.5])
def test_small_distance_plateau(q):
    for f in np.linspace(0.1, 0.9, 9):
        assert spectral_enhancement_ss(q, 1e-4, f) == pytest.approx(q * q / 3, rel=1e-3)


@pytest.mark.parametrize("keg_rho", [1e-4, 1e-3])
@pytest.mark.parametrize("q", [1.5, 2.5])
def test_small_distance_expansion(q, keg_rho):
    for f in np.linspace(0.05, 0.95, 19):
        gap = spectral_enhancement_ss(q, keg_rho, f) - small_rho_spectral_asymptotic(q, keg_rho, f)
        assert abs(gap) <= 1e-3 * q * q / 3


@pytest.mark.parametrize("q", [20.0, 40.0])
def test_q_squared_scaling(q):
    for f in (0.25, 0.5):
        ratio = spectral_enhancement_ss(2 * q, 1.0, f) / spectral_enhancement_ss(q, 1.0, f)
        assert ratio == pytest.approx(4.0, rel=2e-2)


def test_fraction_domain():
    for f in (0.0, 1.0, -0.2, float("nan")):
        with pytest.raises(DomainError):
            spectral_enhancement_ss(2.0, 1.0, f)


def test_spectral_density_is_dimensionful_product():
    value = spectral_density(2.0, 1.0, 0.4, 1e-58, 1e15)
    expected = gamma0_free(1e-58, 0.4 * 1e15, 1e15) * spectral_enhancement_ss(2.0, 1.0, 0.4)
    assert value == pytest.approx(expected, rel=1e-12)


def test_spectrum_points():
    points = spectrum(1.5, 2.0, [0.2, 0.8])
    assert [p.omega_frac for p in points] == [0.2, 0.8]
    assert points[0].enhancement == pytest.approx(points[1].enhancement, abs=1e-12)


def test_total_rate_refinement():
    coarse = total_rate_ratio(1.5, 4.0, n_omega=64)
    assert total_rate_ratio(1.5, 4.0, n_omega=128) == pytest.approx(coarse, abs=1e-6)


def test_total_rate_near_string():
    assert total_rate_ratio(2.0, 1e-4) == pytest.approx(4.0 / 3.0, rel=1e-3)


def test_total_rate_needs_enough_nodes():
    with pytest.raises(DomainError):
        total_rate_ratio(2.0, 1.0, n_omega=8)


def test_weight_table_reproduces_free_space_profile():
    grid = np.linspace(0.0, 1.0, 2001)
    table = pd.DataFrame({"omega_frac": grid, "weight": grid ** 3 * (1 - grid) ** 3})
    assert total_rate_ratio(2.0, 2.0, weight_table=table) == pytest.approx(total_rate_ratio(2.0, 2.0), rel=1e-5)


def test_weight_table_in_free_space():
    table = np.array([[0.0, 1.0], [0.3, 4.0], [1.0, 0.5]])
    assert total_rate_ratio(1.0, 3.0, weight_table=table) == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(DomainError):
        total_rate_ratio(1.0, 3.0, weight_table=np.array([[0.0, -1.0], [1.0, 1.0]]))
