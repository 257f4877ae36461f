"""Electromagnetic mode functions around an idealized cosmic string.

Natural units with c = 1 throughout. The conical angle phi has period
2*pi/q, so the angular phase of a mode is exp(i q m phi). Mode labels
follow the usual cylindrical convention: polarization 0 is transverse
magnetic (TM), 1 is transverse electric (TE).

These functions are not on the rate path; they back the self-consistency
checks (Helmholtz equation, Coulomb gauge, normalization) and the direct
golden-rule oracle in ``opse``.
"""

import logging
import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .config import BesselConfig
from .errors import DomainError
from .specfun import bessel_j

logger = logging.getLogger(__name__)

# finite-difference stencils need J at machine precision
STENCIL_BESSEL = BesselConfig(abs_tol=1e-300, rel_tol=float(np.finfo(float).eps))


def _stencil_j(order, x):
    return bessel_j(order, x, STENCIL_BESSEL)


class Polarization(IntEnum):
    TM = 0
    TE = 1


@dataclass(frozen=True)
class ModeIndex:
    k_perp: float
    k_z: float
    m: int
    polarization: Polarization

    def __post_init__(self):
        if not (math.isfinite(self.k_perp) and self.k_perp > 0):
            raise DomainError(f"k_perp must be finite and > 0, got {self.k_perp!r}")
        if not math.isfinite(self.k_z):
            raise DomainError(f"k_z must be finite, got {self.k_z!r}")
        if int(self.m) != self.m:
            raise DomainError(f"angular index m must be an integer, got {self.m!r}")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "polarization", Polarization(self.polarization))

    @property
    def omega(self):
        return math.hypot(self.k_perp, self.k_z)


@dataclass(frozen=True)
class CylPosition:
    rho: float
    phi: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.rho) and self.rho >= 0):
            raise DomainError(f"rho must be finite and >= 0, got {self.rho!r}")
        if not (math.isfinite(self.phi) and math.isfinite(self.z)):
            raise DomainError("phi and z must be finite")

    def reduced(self, q):
        """Same point with phi folded into one conical period [0, 2*pi/q)."""
        period = 2.0 * math.pi / q
        return CylPosition(self.rho, self.phi % period, self.z)


@dataclass(frozen=True)
class ComplexVec3:
    """Components along (rho-hat, phi-hat, z-hat)."""

    rho: complex
    phi: complex
    z: complex

    def __post_init__(self):
        if not all(np.isfinite(c) for c in (self.rho, self.phi, self.z)):
            raise DomainError("vector components must be finite")

    @classmethod
    def from_sequence(cls, values):
        values = np.asarray(values, dtype=complex).reshape(3)
        return cls(complex(values[0]), complex(values[1]), complex(values[2]))

    def as_array(self):
        return np.array([self.rho, self.phi, self.z], dtype=complex)

    def norm_sq(self):
        return float(np.sum(np.abs(self.as_array()) ** 2))


DIRECTIONS = {
    "rho": np.array([1.0, 0.0, 0.0]),
    "phi": np.array([0.0, 1.0, 0.0]),
    "z": np.array([0.0, 0.0, 1.0]),
}


def _check_q(q):
    if not (math.isfinite(q) and q >= 1):
        raise DomainError(f"q must be >= 1 (q = 1 is free space), got {q!r}")


def normalization_constant(q, k_perp):
    """|beta|^2 = q / (2 pi k_perp)^2 for both polarizations (c = 1)."""
    _check_q(q)
    if not (math.isfinite(k_perp) and k_perp > 0):
        raise DomainError(f"k_perp must be finite and > 0, got {k_perp!r}")
    return q / (2.0 * math.pi * k_perp) ** 2


def _radial_profile(nu, x, jv):
    """J_nu(x), J_nu'(x) and (nu/x) J_nu(x), finite at x = 0."""
    if nu == 0:
        return jv(0.0, x), -jv(1.0, x), 0.0
    lower = jv(nu - 1.0, x)
    upper = jv(nu + 1.0, x)
    return jv(nu, x), 0.5 * (lower - upper), 0.5 * (lower + upper)


def mode_vector_potential(mode, pos, q, t=0.0, jv=None):
    """Vector potential A_{k p} at ``pos`` as a ComplexVec3.

    ``jv(order, x)`` overrides the Bessel evaluator (the golden-rule oracle
    passes ``bessel_j_oracle``).
    """
    _check_q(q)
    jv = jv or bessel_j
    pos = pos.reduced(q)
    nu = q * abs(mode.m)
    x = mode.k_perp * pos.rho
    value, slope, ratio = _radial_profile(nu, x, jv)

    omega = mode.omega
    phase = np.exp(1j * (q * mode.m * pos.phi + mode.k_z * pos.z - omega * t))
    grad_rho = mode.k_perp * slope * phase
    # (1/rho) d/dphi = i q m / rho = i sign(m) k_perp (nu/x)
    grad_phi = 1j * np.sign(mode.m) * mode.k_perp * ratio * phase
    beta = math.sqrt(normalization_constant(q, mode.k_perp))

    if mode.polarization is Polarization.TM:
        scale = beta / (1j * omega)
        return ComplexVec3(
            scale * 1j * mode.k_z * grad_rho,
            scale * 1j * mode.k_z * grad_phi,
            scale * mode.k_perp ** 2 * value * phase,
        )
    # -beta z x grad_perp F, with z x rho-hat = phi-hat and z x phi-hat = -rho-hat
    return ComplexVec3(beta * grad_phi, -beta * grad_rho, 0.0)


def dipole_coupling(mode, pos, q, direction, jv=None):
    """|d-hat . A|^2 for a unit dipole along 'rho', 'phi', 'z' or a 3-vector."""
    if isinstance(direction, str):
        try:
            d = DIRECTIONS[direction]
        except KeyError:
            raise DomainError(f"unknown dipole direction {direction!r}") from None
    else:
        d = np.asarray(direction, dtype=complex).reshape(3)
        d = d / np.linalg.norm(d)
    a = mode_vector_potential(mode, pos, q, jv=jv).as_array()
    return float(abs(np.dot(d, a)) ** 2)


def _axial_field(mode, q, rho, phi):
    return _stencil_j(q * abs(mode.m), mode.k_perp * rho) * np.exp(1j * q * mode.m * phi)


def helmholtz_residual(mode, pos, q, h=None):
    """|(lap_perp + k_perp^2) F_z| by second-order central differences.

    F_z = J_{q|m|}(k_perp rho) exp(i q m phi); the default step is
    1e-4 / k_perp in rho and the matching arc length in phi.
    """
    _check_q(q)
    h = 1e-4 / mode.k_perp if h is None else h
    rho, phi = pos.rho, pos.phi
    if rho <= 2.0 * h:
        raise DomainError(f"rho={rho!r} too close to the string for step h={h!r}")
    hphi = h / rho

    f0 = _axial_field(mode, q, rho, phi)
    f_out = _axial_field(mode, q, rho + h, phi)
    f_in = _axial_field(mode, q, rho - h, phi)
    f_ccw = _axial_field(mode, q, rho, phi + hphi)
    f_cw = _axial_field(mode, q, rho, phi - hphi)

    d2_rho = (f_out - 2.0 * f0 + f_in) / h ** 2
    d1_rho = (f_out - f_in) / (2.0 * h)
    d2_phi = (f_ccw - 2.0 * f0 + f_cw) / hphi ** 2
    laplacian = d2_rho + d1_rho / rho + d2_phi / rho ** 2
    return float(abs(laplacian + mode.k_perp ** 2 * f0))


def coulomb_gauge_divergence(mode, pos, q, h=None):
    """|div A| by central differences in cylindrical coordinates.

    div A = (1/rho) d(rho A_rho)/drho + (1/rho) dA_phi/dphi + dA_z/dz
    """
    _check_q(q)
    h = 1e-4 / mode.omega if h is None else h
    rho, phi, z = pos.rho, pos.phi, pos.z
    if rho <= 2.0 * h:
        raise DomainError(f"rho={rho!r} too close to the string for step h={h!r}")
    hphi = h / rho

    def field(r, p, zz):
        return mode_vector_potential(mode, CylPosition(r, p, zz), q, jv=_stencil_j)

    radial = (
        (rho + h) * field(rho + h, phi, z).rho - (rho - h) * field(rho - h, phi, z).rho
    ) / (2.0 * h * rho)
    angular = (field(rho, phi + hphi, z).phi - field(rho, phi - hphi, z).phi) / (2.0 * hphi * rho)
    axial = (field(rho, phi, z + h).z - field(rho, phi, z - h).z) / (2.0 * h)
    return float(abs(radial + angular + axial))


def helmholtz_tolerance(mode, pos, q):
    """Bound 1e-5 k_perp^2 |F_z| + 1e-8 for ``helmholtz_residual``.

    |F_z| is floored at 0.1: near a Bessel zero the finite-difference noise
    scales with the local amplitude of J, not with |F_z| itself. Rounding in
    the five-point stencil alone is about 4 eps |J|max / h^2, i.e. roughly
    9e-8 k_perp^2 |J|max at the default step, and h ~ eps^(1/4) / k_perp
    already balances that against the O(h^2) truncation.
    """
    field = abs(bessel_j(q * abs(mode.m), mode.k_perp * pos.rho))
    return 1e-5 * mode.k_perp ** 2 * max(field, 0.1) + 1e-8


def gauge_tolerance(mode, q):
    """Bound 1e-5 omega |A| for ``coulomb_gauge_divergence``, |A| ~ beta k_perp."""
    return 1e-5 * mode.omega * math.sqrt(normalization_constant(q, mode.k_perp)) * mode.k_perp
