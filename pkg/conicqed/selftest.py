"""Invariant suite behind ``conicqed selftest``.

Checks are tagged ``analytic`` (closed-form identities and limits) or
``derived`` (agreement with the slow reference evaluations). ``quick``
runs the analytic ones only. Sums are driven by the supplied numerics, so
a loose truncation tolerance makes the identity checks fail by name.
"""

import logging
import math
from dataclasses import asdict, dataclass

import numpy as np

from .config import DEFAULT_NUMERICS
from .errors import ConicQEDError
from .modes import (
    CylPosition,
    ModeIndex,
    Polarization,
    coulomb_gauge_divergence,
    gauge_tolerance,
    helmholtz_residual,
    helmholtz_tolerance,
)
from .opse import Orientation, golden_rule_direct, large_q_approx, purcell_all, purcell_factor, small_rho_asymptotic
from .quad import sum_symmetric_m
from .specfun import bessel_j, bessel_j_ladder, bessel_j_oracle
from .tpse import spectral_enhancement_ss

logger = logging.getLogger(__name__)

ANALYTIC = "analytic"
DERIVED = "derived"

_ORIENTS = (Orientation.Z, Orientation.RHO, Orientation.PHI)


@dataclass(frozen=True)
class CheckResult:
    name: str
    kind: str
    passed: bool
    detail: str

    def as_dict(self):
        return asdict(self)


def _free_space(cfg):
    worst = 0.0
    for x in (0.1, 1.0, 5.0, 20.0):
        factors = purcell_all(1.0, x, cfg)
        for value in (factors.p_z, factors.p_rho, factors.p_phi, factors.p_iso):
            worst = max(worst, abs(value - 1.0))
    return worst <= 1e-8, f"max |P - 1| = {worst:.3e}"


def _bessel_sums(cfg):
    worst = 0.0
    for x in (1.0, 5.0, 15.0, 30.0):
        ladder = bessel_j_ladder(0.0, int(x) + 80, np.array([x]), cfg.bessel)[:, 0]

        def square(m):
            return ladder[m] ** 2

        def cross(m):
            return -ladder[1] ** 2 if m == 0 else ladder[m + 1] * ladder[m - 1]

        squares = sum_symmetric_m(square, cfg.truncation).value
        crosses = sum_symmetric_m(cross, cfg.truncation).value
        worst = max(worst, abs(squares - 1.0), abs(crosses))
    return worst <= 1e-10, f"max identity error = {worst:.3e}"


def _selection_rule(cfg):
    worst_z, worst_t = 0.0, 0.0
    for q in (1.5, 2.0, 2.5, 3.0):
        factors = purcell_all(q, 1e-6, cfg)
        worst_z = max(worst_z, abs(factors.p_z - q))
        worst_t = max(worst_t, factors.p_rho, factors.p_phi)
    return worst_z <= 1e-4 and worst_t < 1e-6, f"|P_z - q| = {worst_z:.3e}, max transverse = {worst_t:.3e}"


def _small_distance(cfg):
    worst = 0.0
    for q in (1.5, 2.5):
        for x in (0.01, 0.03, 0.05):
            for orient in _ORIENTS:
                gap = abs(purcell_factor(orient, q, x, cfg) - small_rho_asymptotic(orient, q, x)) / q
                worst = max(worst, gap)
    return worst <= 1e-2, f"max relative gap = {worst:.3e}"


def _large_q(cfg):
    worst = 0.0
    for q, x in ((8.0, 3.0), (12.0, 5.0), (20.0, 10.0)):
        for orient in _ORIENTS:
            exact = purcell_factor(orient, q, x, cfg)
            worst = max(worst, abs(exact - large_q_approx(orient, q, x, cfg)) / abs(exact))
    return worst <= 1e-4, f"max relative gap = {worst:.3e}"


def _spectral_symmetry(cfg):
    worst = 0.0
    fracs = np.arange(1, 100) / 100.0
    for q, x in ((1.5, 4.0), (2.5, 10.0)):
        values = np.array([spectral_enhancement_ss(q, x, f, cfg) for f in fracs])
        worst = max(worst, float(np.max(np.abs(values - values[::-1]))))
    return worst <= 1e-12, f"max asymmetry = {worst:.3e}"


def _spectral_plateau(cfg):
    worst = 0.0
    for q in (1.5, 2.5):
        for f in np.linspace(0.1, 0.9, 9):
            value = spectral_enhancement_ss(q, 1e-4, float(f), cfg)
            worst = max(worst, abs(value / (q * q / 3.0) - 1.0))
    return worst <= 1e-3, f"max relative deviation from q^2/3 = {worst:.3e}"


def _mode_checks(cfg):
    rng = np.random.default_rng(20240611)
    worst_h, worst_g = 0.0, 0.0
    for _ in range(10):
        q = float(rng.uniform(1.0, 3.0))
        k_perp = float(rng.uniform(0.5, 3.0))
        k_z = float(rng.uniform(-2.0, 2.0))
        m = int(rng.integers(-3, 4))
        rho = float(rng.uniform(0.5, 5.0)) / k_perp
        pos = CylPosition(rho, float(rng.uniform(0.0, 2.0 * math.pi / q)), float(rng.uniform(-1.0, 1.0)))
        for pol in Polarization:
            mode = ModeIndex(k_perp, k_z, m, pol)
            worst_h = max(worst_h, helmholtz_residual(mode, pos, q) / helmholtz_tolerance(mode, pos, q))
            worst_g = max(worst_g, coulomb_gauge_divergence(mode, pos, q) / gauge_tolerance(mode, q))
    passed = worst_h <= 1.0 and worst_g <= 1.0
    return passed, f"residual / bound: helmholtz {worst_h:.3e}, gauge {worst_g:.3e}"


def _bessel_oracle(cfg):
    worst = 0.0
    for nu in np.linspace(0.0, 50.0, 8):
        for x in np.linspace(0.0, 50.0, 8):
            worst = max(worst, abs(bessel_j(nu, x, cfg.bessel) - bessel_j_oracle(nu, x)))
    return worst <= 1e-10, f"max |J - oracle| = {worst:.3e}"


def _golden_rule(cfg):
    gap = abs(purcell_factor(Orientation.Z, 1.5, 2.0, cfg) - golden_rule_direct(Orientation.Z, 1.5, 2.0))
    return gap <= 1e-6, f"|P_z - direct| = {gap:.3e}"


CHECKS = (
    ("free-space-recovery", ANALYTIC, _free_space),
    ("bessel-sum-identities", ANALYTIC, _bessel_sums),
    ("selection-rule-limit", ANALYTIC, _selection_rule),
    ("small-distance-asymptotics", ANALYTIC, _small_distance),
    ("large-q-collapse", ANALYTIC, _large_q),
    ("spectral-exchange-symmetry", ANALYTIC, _spectral_symmetry),
    ("spectral-small-distance-plateau", ANALYTIC, _spectral_plateau),
    ("mode-helmholtz-and-gauge", DERIVED, _mode_checks),
    ("bessel-oracle-agreement", DERIVED, _bessel_oracle),
    ("golden-rule-oracle", DERIVED, _golden_rule),
)


def run_selftest(cfg=DEFAULT_NUMERICS, quick=False):
    """Run every check (analytic ones only if ``quick``); never raises."""
    results = []
    for name, kind, check in CHECKS:
        if quick and kind == DERIVED:
            continue
        try:
            passed, detail = check(cfg)
        except ConicQEDError as e:
            passed, detail = False, f"{type(e).__name__}: {e}"
        logger.info("selftest %s: %s (%s)", name, "pass" if passed else "FAIL", detail)
        results.append(CheckResult(name, kind, bool(passed), detail))
    return results


def format_report(results):
    lines = [f"{'PASS' if r.passed else 'FAIL'}  {r.name:<34} [{r.kind}] {r.detail}" for r in results]
    failed = sum(not r.passed for r in results)
    lines.append(f"{len(results) - failed}/{len(results)} checks passed")
    return "\n".join(lines)
