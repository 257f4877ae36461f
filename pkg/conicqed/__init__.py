"""Spontaneous emission of a dipole emitter near an idealized cosmic string."""

from .config import DEFAULT_NUMERICS, BesselConfig, NumericsConfig, TruncationPolicy, load_settings
from .errors import ConicQEDError, ConvergenceError, DomainError, EvaluationError, ResonanceError, UsageError
from .opse import (
    Orientation,
    PurcellFactors,
    StringBackground,
    free_space_rate,
    large_q_approx,
    purcell_all,
    purcell_factor,
    purcell_for_dipole,
    q_from_mu,
    small_rho_asymptotic,
)
from .specfun import bessel_j, bessel_j_oracle
from .tpse import LevelScheme, spectral_enhancement_general, spectral_enhancement_ss, total_rate_ratio

__version__ = "0.1.0"
