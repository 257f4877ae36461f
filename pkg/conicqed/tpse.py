"""Two-photon spontaneous emission: spectral density and its enhancement.

The Green tensor of the conical background is diagonal in the
(rho-hat, phi-hat, z-hat) frame, so the spectral enhancement is a weighted
sum of products of frequency-dependent Purcell factors,

    gamma/gamma_0 = sum_ij |D_ij|^2/|D|^2 P_i(omega) P_j(omega_eg - omega),

where P_i(omega) is the one-photon factor with k_eg rho replaced by
(omega/omega_eg) k_eg rho. For an s -> s transition the weight is delta_ij/3.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import constants

from .config import DEFAULT_NUMERICS
from .errors import DomainError, ResonanceError
from .modes import ComplexVec3
from .opse import check_q, purcell_frame

logger = logging.getLogger(__name__)

# relative pole guard for omega near an intermediate level
POLE_GUARD = 1e-9

_FRAME = np.eye(3)


@dataclass(frozen=True)
class IntermediateLevel:
    omega_em: float
    d_em: ComplexVec3
    d_mg: ComplexVec3

    def __post_init__(self):
        if not math.isfinite(self.omega_em):
            raise DomainError(f"omega_em must be finite, got {self.omega_em!r}")
        for name in ("d_em", "d_mg"):
            value = getattr(self, name)
            if not isinstance(value, ComplexVec3):
                object.__setattr__(self, name, ComplexVec3.from_sequence(value))


@dataclass(frozen=True)
class LevelScheme:
    omega_eg: float
    intermediates: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if not (math.isfinite(self.omega_eg) and self.omega_eg > 0):
            raise DomainError(f"omega_eg must be finite and > 0, got {self.omega_eg!r}")
        object.__setattr__(self, "intermediates", tuple(self.intermediates))
        if not self.intermediates:
            raise DomainError("a level scheme needs at least one intermediate level")

    @classmethod
    def isotropic(cls, omega_eg, omega_m, dipole=1.0):
        """s -> s scheme: three degenerate levels with dipoles along each axis."""
        levels = [IntermediateLevel(omega_m, dipole * axis, dipole * axis) for axis in _FRAME]
        return cls(omega_eg, levels)

    @classmethod
    def single_axis(cls, omega_eg, omega_m, axis=2, dipole=1.0):
        """One level coupling only along frame axis 0=rho, 1=phi, 2=z."""
        vec = dipole * _FRAME[axis]
        return cls(omega_eg, [IntermediateLevel(omega_m, vec, vec)])


@dataclass(frozen=True)
class DTensor:
    entries: np.ndarray
    omega: float
    omega_prime: float

    @property
    def norm_sq(self):
        """|D|^2 = D_ij D*_ij."""
        return float(np.sum(np.abs(self.entries) ** 2))


@dataclass(frozen=True)
class SpectralPoint:
    omega_frac: float
    enhancement: float
    q: float
    keg_rho: float


def d_tensor(scheme, omega, omega_prime):
    """D_ij = sum_m [d_em,i d_mg,j/(w_em - w) + d_mg,i d_em,j/(w_em - w')]."""
    guard = POLE_GUARD * scheme.omega_eg
    entries = np.zeros((3, 3), dtype=complex)
    for index, level in enumerate(scheme.intermediates):
        for freq in (omega, omega_prime):
            if abs(level.omega_em - freq) < guard:
                raise ResonanceError(
                    f"frequency {freq!r} is on the pole of intermediate level {index} "
                    f"(omega_em={level.omega_em!r})",
                    level_index=index,
                )
        d_em = level.d_em.as_array()
        d_mg = level.d_mg.as_array()
        entries += np.outer(d_em, d_mg) / (level.omega_em - omega) + np.outer(d_mg, d_em) / (
            level.omega_em - omega_prime
        )
    if not np.all(np.isfinite(entries)):
        raise DomainError("D tensor has non-finite entries")
    return DTensor(entries, float(omega), float(omega_prime))


def d_isotropy_ratio(d):
    """Entry-wise |D_ij|^2 / |D|^2; the entries sum to one."""
    norm_sq = d.norm_sq
    if norm_sq == 0:
        raise DomainError("D tensor is identically zero")
    return np.abs(d.entries) ** 2 / norm_sq


def gamma0_free(scheme_d_sq, omega, omega_eg):
    """Free-space spectral density mu0^2/(36 pi^3 hbar^2 c^2) w^3 (w_eg - w)^3 |D|^2."""
    if not (math.isfinite(omega_eg) and omega_eg > 0):
        raise DomainError(f"omega_eg must be finite and > 0, got {omega_eg!r}")
    if not (math.isfinite(omega) and 0 <= omega <= omega_eg):
        raise DomainError(f"omega={omega!r} outside [0, omega_eg={omega_eg!r}]")
    prefactor = constants.mu_0 ** 2 / (36.0 * math.pi ** 3 * constants.hbar ** 2 * constants.c ** 2)
    return prefactor * omega ** 3 * (omega_eg - omega) ** 3 * scheme_d_sq


def _check_fraction(omega_frac):
    if not (math.isfinite(omega_frac) and 0 < omega_frac < 1):
        raise DomainError(f"omega_frac must lie strictly inside (0, 1), got {omega_frac!r}")


def _factor_pair(q, keg_rho, omega_frac, cfg):
    check_q(q)
    _check_fraction(omega_frac)
    if not (math.isfinite(keg_rho) and keg_rho >= 0):
        raise DomainError(f"keg_rho must be finite and >= 0, got {keg_rho!r}")
    first = np.array(purcell_frame(q, omega_frac * keg_rho, cfg))
    second = np.array(purcell_frame(q, (1.0 - omega_frac) * keg_rho, cfg))
    return first, second


def spectral_enhancement_ss(q, keg_rho, omega_frac, cfg=DEFAULT_NUMERICS):
    """gamma/gamma_0 for an s -> s transition: (1/3) sum_i P_i(w) P_i(w_eg - w)."""
    first, second = _factor_pair(q, keg_rho, omega_frac, cfg)
    return float(np.dot(first, second)) / 3.0


def spectral_enhancement_general(q, keg_rho, omega_frac, scheme, cfg=DEFAULT_NUMERICS):
    """gamma/gamma_0 with the |D_ij|^2/|D|^2 weight of an arbitrary level scheme."""
    first, second = _factor_pair(q, keg_rho, omega_frac, cfg)
    omega = omega_frac * scheme.omega_eg
    ratio = d_isotropy_ratio(d_tensor(scheme, omega, scheme.omega_eg - omega))
    return float(first @ ratio @ second)


def small_rho_spectral_asymptotic(q, keg_rho, omega_frac):
    """(q^2/3){1 - 2/5 (k_eg rho)^2 [f^2 + (1-f)^2]} for k_eg rho << 1."""
    check_q(q)
    _check_fraction(omega_frac)
    f = omega_frac
    return q * q / 3.0 * (1.0 - 0.4 * keg_rho ** 2 * (f * f + (1.0 - f) ** 2))


def spectral_density(q, keg_rho, omega_frac, scheme_d_sq, omega_eg, cfg=DEFAULT_NUMERICS):
    """Dimensionful gamma(omega) = gamma_0(omega) * gamma/gamma_0 (s -> s)."""
    enhancement = spectral_enhancement_ss(q, keg_rho, omega_frac, cfg)
    return gamma0_free(scheme_d_sq, omega_frac * omega_eg, omega_eg) * enhancement


def spectrum(q, keg_rho, omega_fracs, cfg=DEFAULT_NUMERICS):
    return [
        SpectralPoint(float(f), spectral_enhancement_ss(q, keg_rho, float(f), cfg), q, keg_rho)
        for f in omega_fracs
    ]


def _gauss_on(a, b, n):
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def _table_weight(weight_table):
    if hasattr(weight_table, "columns"):
        fracs = np.asarray(weight_table["omega_frac"], dtype=float)
        weights = np.asarray(weight_table["weight"], dtype=float)
    else:
        table = np.asarray(weight_table, dtype=float)
        fracs, weights = table[:, 0], table[:, 1]
    order = np.argsort(fracs)
    fracs, weights = fracs[order], weights[order]
    if np.any(weights < 0) or not np.all(np.isfinite(weights)):
        raise DomainError("weight table entries must be finite and non-negative")
    return lambda f: np.interp(f, fracs, weights)


def total_rate_ratio(q, keg_rho, cfg=DEFAULT_NUMERICS, n_omega=64, weight_table=None):
    """Gamma/Gamma_0 = int gamma domega / int gamma_0 domega.

    With no ``weight_table`` the free-space profile is w^3 (w_eg - w)^3
    (constant |D|), symmetric about w_eg/2, so only (0, 1/2] is integrated.
    A table of (omega_frac, weight) rows replaces that profile and is
    integrated over the whole interval.
    """
    if int(n_omega) < 16:
        raise DomainError(f"n_omega must be >= 16, got {n_omega!r}")
    check_q(q)
    if weight_table is None:
        fracs, w = _gauss_on(0.0, 0.5, int(n_omega))
        profile = fracs ** 3 * (1.0 - fracs) ** 3
    else:
        fracs, w = _gauss_on(0.0, 1.0, 2 * int(n_omega))
        profile = _table_weight(weight_table)(fracs)
    norm = float(np.dot(w, profile))
    if norm <= 0:
        raise DomainError("weight profile integrates to zero")
    values = np.array([spectral_enhancement_ss(q, keg_rho, float(f), cfg) for f in fracs])
    ratio = float(np.dot(w, values * profile)) / norm
    logger.debug("total rate ratio q=%g keg_rho=%g n_omega=%d -> %.12g", q, keg_rho, n_omega, ratio)
    return ratio
