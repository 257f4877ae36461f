"""One-photon spontaneous emission near a cosmic string.

Normalized rates (Purcell factors) for a dipole along z (parallel to the
string), rho (radial) and phi (tangential):

    P_z   = 3q/2 sum_m int_0^1 du u^3/sqrt(1-u^2) J^2_{q|m|}(x u)
    P_rho = 3q/8 sum_m int_0^1 du u/sqrt(1-u^2)
            [(2-u^2)(J^2_{q|m|-1} + J^2_{q|m|+1}) + 2u^2 J_{q|m|-1} J_{q|m|+1}]
    P_phi = same as P_rho with the sign of the cross term flipped

with x = k_eg rho. The isotropic factor is the mean of the three.
"""

import logging
import math
from dataclasses import asdict, dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy import constants
from scipy.special import gamma

from .config import DEFAULT_NUMERICS
from .errors import DomainError
from .modes import CylPosition, ModeIndex, Polarization, dipole_coupling
from .quad import gauss_legendre_rule, require_converged, sum_symmetric_m
from .specfun import bessel_j_ladder, bessel_j_oracle

logger = logging.getLogger(__name__)

# mu must stay below c^2/4G, otherwise the geometry is no longer conical
MU_LIMIT = constants.c ** 2 / (4.0 * constants.G)


class Orientation(str, Enum):
    Z = "z"
    RHO = "rho"
    PHI = "phi"
    ISO = "iso"


@dataclass(frozen=True)
class StringBackground:
    q: float = 1.0

    def __post_init__(self):
        check_q(self.q)

    @classmethod
    def from_mu(cls, mu):
        return cls(q_from_mu(mu))

    @property
    def mu(self):
        return mu_from_q(self.q)

    @property
    def deficit_angle(self):
        return deficit_angle(self.q)


@dataclass(frozen=True)
class PurcellFactors:
    p_z: float
    p_rho: float
    p_phi: float
    p_iso: float
    keg_rho: float
    q: float

    def as_dict(self):
        return asdict(self)

    def frame_vector(self):
        """(P_rho, P_phi, P_z), the Green-tensor index order."""
        return np.array([self.p_rho, self.p_phi, self.p_z])


def check_q(q):
    try:
        q = float(q)
    except (TypeError, ValueError):
        raise DomainError(f"q must be a real number, got {q!r}") from None
    if not math.isfinite(q) or q < 1:
        raise DomainError(f"q must be greater than or equal to 1 (q = 1 is free space), got {q!r}")


def _check_distance(keg_rho):
    if not math.isfinite(keg_rho) or keg_rho < 0:
        raise DomainError(f"keg_rho must be finite and >= 0, got {keg_rho!r}")


def _orientation(orient):
    try:
        return Orientation(orient)
    except ValueError:
        raise DomainError(f"unknown orientation {orient!r}") from None


class _ModeSum:
    """Per-m summands for one (q, k_eg rho), sharing Bessel evaluations."""

    def __init__(self, q, keg_rho, cfg):
        rule = gauss_legendre_rule(cfg.nodes)
        self.q = q
        self.u = rule.u
        self.weights = rule.weights
        self.arg = keg_rho * self.u
        self.bessel = cfg.bessel
        self._cache = {}

    def triplet(self, m):
        """(J_{q|m|-1}, J_{q|m|}, J_{q|m|+1}) at the u-nodes."""
        if m not in self._cache:
            if m == 0:
                j0, j1 = bessel_j_ladder(0.0, 2, self.arg, self.bessel)
                self._cache[m] = (-j1, j0, j1)
            else:
                self._cache[m] = tuple(bessel_j_ladder(self.q * m - 1.0, 3, self.arg, self.bessel))
        return self._cache[m]

    def z_term(self, m):
        _, mid, _ = self.triplet(m)
        return 1.5 * self.q * float(np.dot(self.weights, self.u ** 3 * mid * mid))

    def _transverse(self, m, sign):
        lo, _, hi = self.triplet(m)
        u2 = self.u * self.u
        bracket = (2.0 - u2) * (lo * lo + hi * hi) + sign * 2.0 * u2 * lo * hi
        return 0.375 * self.q * float(np.dot(self.weights, self.u * bracket))

    def rho_term(self, m):
        return self._transverse(m, 1.0)

    def phi_term(self, m):
        return self._transverse(m, -1.0)

    def term(self, orient):
        return {
            Orientation.Z: self.z_term,
            Orientation.RHO: self.rho_term,
            Orientation.PHI: self.phi_term,
        }[orient]


def _at_string(orient, q):
    # only zero-order Bessel terms survive at rho = 0
    if orient is Orientation.Z:
        return float(q)
    return 1.0 if q == 1 else 0.0


def _summed(kernel, orient, q, keg_rho, cfg):
    report = sum_symmetric_m(kernel.term(orient), cfg.truncation)
    return require_converged(report, q=q, keg_rho=keg_rho, orientation=orient.value)


def purcell_factor(orient, q, keg_rho, cfg=DEFAULT_NUMERICS):
    """Gamma_orient / Gamma_0 at dimensionless distance keg_rho = k_eg rho."""
    orient = _orientation(orient)
    check_q(q)
    _check_distance(keg_rho)
    if orient is Orientation.ISO:
        return purcell_all(q, keg_rho, cfg).p_iso
    if keg_rho == 0:
        return _at_string(orient, q)
    return _summed(_ModeSum(q, keg_rho, cfg), orient, q, keg_rho, cfg)


def purcell_all(q, keg_rho, cfg=DEFAULT_NUMERICS):
    """All three orientations plus the isotropic mean, sharing Bessel values."""
    check_q(q)
    _check_distance(keg_rho)
    if keg_rho == 0:
        p_z, p_rho, p_phi = (_at_string(o, q) for o in (Orientation.Z, Orientation.RHO, Orientation.PHI))
    else:
        kernel = _ModeSum(q, keg_rho, cfg)
        p_z = _summed(kernel, Orientation.Z, q, keg_rho, cfg)
        p_rho = _summed(kernel, Orientation.RHO, q, keg_rho, cfg)
        p_phi = _summed(kernel, Orientation.PHI, q, keg_rho, cfg)
    return PurcellFactors(p_z, p_rho, p_phi, (p_z + p_rho + p_phi) / 3.0, keg_rho, q)


@lru_cache(maxsize=8192)
def purcell_frame(q, keg_rho, cfg=DEFAULT_NUMERICS):
    """Cached (P_rho, P_phi, P_z) tuple; spectra reuse each argument twice."""
    return tuple(purcell_all(q, keg_rho, cfg).frame_vector())


def purcell_for_dipole(dipole, q, keg_rho, cfg=DEFAULT_NUMERICS):
    """Gamma / Gamma_0 for a dipole given in the (rho, phi, z) frame."""
    d = np.asarray(dipole, dtype=complex).reshape(3)
    weight = np.abs(d) ** 2
    total = float(np.sum(weight))
    if total == 0:
        raise DomainError("dipole vector must be non-zero")
    return float(np.dot(weight / total, purcell_all(q, keg_rho, cfg).frame_vector()))


def small_rho_asymptotic(orient, q, keg_rho):
    """Closed-form expansion of the Purcell factors for k_eg rho << 1 (q > 1)."""
    orient = _orientation(orient)
    if not (math.isfinite(q) and q > 1):
        raise DomainError(f"small-distance expansion needs q > 1, got {q!r}")
    x = float(keg_rho)
    _check_distance(x)
    if orient is Orientation.ISO:
        parts = [small_rho_asymptotic(o, q, x) for o in (Orientation.Z, Orientation.RHO, Orientation.PHI)]
        return sum(parts) / 3.0
    if orient is Orientation.Z:
        return q * (1.0 - 0.4 * x ** 2 + 3.0 * (q + 1.0) * x ** (2.0 * q) / ((q + 1.5) * gamma(2.0 * q + 2.0)))
    # m = +-1 terms: J_{q-1}(z) ~ (z/2)^{q-1} / Gamma(q)
    edge = 3.0 * (q + 1.0) / (4.0 * (q + 0.5) * gamma(2.0 * q)) * x ** (2.0 * (q - 1.0))
    quadratic = 0.05 if orient is Orientation.RHO else 0.25
    return q * (quadratic * x ** 2 + edge)


def large_q_approx(orient, q, keg_rho, cfg=DEFAULT_NUMERICS):
    """The m = 0 term alone; accurate once q is a few units above k_eg rho.

    Unlike the exact factors the rho and phi values differ here: at m = 0 the
    radial bracket is 4 (1 - u^2) J_1^2 while the tangential one is 4 J_1^2.
    """
    orient = _orientation(orient)
    check_q(q)
    _check_distance(keg_rho)
    kernel = _ModeSum(q, keg_rho, cfg)
    if orient is Orientation.ISO:
        return (kernel.z_term(0) + kernel.rho_term(0) + kernel.phi_term(0)) / 3.0
    return kernel.term(orient)(0)


def free_space_rate(dipole_sq, omega_eg):
    """Gamma_0 = |d|^2 omega^3 / (3 pi eps0 hbar c^3) in 1/s (SI inputs)."""
    if not (math.isfinite(dipole_sq) and dipole_sq >= 0):
        raise DomainError(f"|d|^2 must be finite and >= 0, got {dipole_sq!r}")
    if not (math.isfinite(omega_eg) and omega_eg > 0):
        raise DomainError(f"omega_eg must be finite and > 0, got {omega_eg!r}")
    return dipole_sq * omega_eg ** 3 / (
        3.0 * math.pi * constants.epsilon_0 * constants.hbar * constants.c ** 3
    )


def q_from_mu(mu):
    """q = 2 pi / (2 pi - delta_phi) with delta_phi = 8 pi G mu / c^2."""
    if not (math.isfinite(mu) and mu >= 0):
        raise DomainError(f"mu must be finite and >= 0, got {mu!r}")
    if mu >= MU_LIMIT:
        raise DomainError(
            f"mu={mu:.6g} kg/m exceeds c^2/4G={MU_LIMIT:.6g} kg/m; "
            "the geometry would degenerate into another topology"
        )
    return 1.0 / (1.0 - mu / MU_LIMIT)


def mu_from_q(q):
    check_q(q)
    return MU_LIMIT * (1.0 - 1.0 / q)


def deficit_angle(q):
    """delta_phi = 2 pi (1 - 1/q)."""
    check_q(q)
    return 2.0 * math.pi * (1.0 - 1.0 / q)


def golden_rule_direct(orient, q, keg_rho, nodes=512, m_cut=None):
    """Gamma/Gamma_0 from the golden rule before the delta-function reduction.

    The mode sum is done on the energy shell k = k_eg = 1: k_perp = sin(t),
    k_z = cos(t), t in (0, pi), both k_z branches included, both
    polarizations and every m in [-m_cut, m_cut] summed explicitly with
    couplings taken from ``dipole_coupling`` and Bessel values from
    the integral-representation oracle:

        Gamma/Gamma_0 = 3 pi^2 sum_{m,p} int_0^pi sin(t) |d.A_{m,p}|^2 dt
    """
    orient = _orientation(orient)
    check_q(q)
    _check_distance(keg_rho)
    if m_cut is None:
        m_cut = int(math.ceil((keg_rho + 25.0) / q)) + 1
    directions = ["z", "rho", "phi"] if orient is Orientation.ISO else [orient.value]

    jv = lru_cache(maxsize=None)(bessel_j_oracle)
    x, w = np.polynomial.legendre.leggauss(nodes)
    theta = 0.5 * math.pi * (x + 1.0)
    w = 0.5 * math.pi * w
    pos = CylPosition(keg_rho, 0.0, 0.0)

    total = 0.0
    for t, wt in zip(theta, w):
        k_perp, k_z = math.sin(t), math.cos(t)
        shell = 0.0
        for m in range(-m_cut, m_cut + 1):
            for pol in Polarization:
                mode = ModeIndex(k_perp, k_z, m, pol)
                shell += sum(dipole_coupling(mode, pos, q, d, jv=jv) for d in directions)
        total += wt * k_perp * shell
    logger.debug("direct golden-rule integral q=%g keg_rho=%g m_cut=%d", q, keg_rho, m_cut)
    return 3.0 * math.pi ** 2 * total / len(directions)
