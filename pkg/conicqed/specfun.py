"""Bessel functions of the first kind for real order.

All rate formulas reduce to J_nu with nu = q|m| and q|m| +- 1, so the
order is generally non-integer. Small arguments use the ascending power
series; larger arguments use Miller's downward recurrence normalised with
the Neumann identity

    (x/2)**a = sum_k (a + 2k) Gamma(a + k) / k! * J_{a+2k}(x),   0 <= a < 1,

which is stable whether the order is above or below the argument.

``bessel_j_oracle`` is an independent, deliberately slow evaluation from
the integral representation and is meant for tests and the self-test.
"""

import logging
import math
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaln

from .config import BesselConfig
from .errors import DomainError

logger = logging.getLogger(__name__)

DEFAULT_BESSEL = BesselConfig()

_RESCALE = 1e200

# ln(1e18): the oracle tail is cut where its integrand drops below 1e-18
_TAIL_LOG_CUT = 18.0 * math.log(10.0)
_ORACLE_PANELS = 16
_ORACLE_PANEL_NODES = 64


def _check_order(order):
    if not math.isfinite(order):
        raise DomainError(f"Bessel order must be finite, got {order!r}")
    if order < 0 and order != math.floor(order):
        raise DomainError(f"negative non-integer Bessel order {order!r} is not supported")


def _as_arguments(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("Bessel argument must be finite")
    if np.any(x < 0):
        raise DomainError("Bessel argument must be non-negative")
    return x


def _series(nu, x, cfg):
    """Ascending series sum_k (-x^2/4)^k / (k! Gamma(nu+k+1)) * (x/2)^nu."""
    half = 0.5 * x
    with np.errstate(divide="ignore", invalid="ignore"):
        lead = np.exp(nu * np.log(half) - gammaln(nu + 1.0))
    term = np.where(x > 0, lead, 1.0 if nu == 0 else 0.0)
    total = term.copy()
    step = -half * half
    for k in range(1, cfg.series_max_terms + 1):
        term = term * step / (k * (nu + k))
        total = total + term
        # terms only shrink once k(nu + k) exceeds x^2/4
        shrinking = k * (nu + k) > -step
        if np.all(shrinking & (np.abs(term) <= cfg.abs_tol + cfg.rel_tol * np.abs(total))):
            break
    return total


def _neumann_coefficients(alpha, count):
    """(alpha + 2j) Gamma(alpha + j) / j! for j = 0..count-1."""
    coeffs = np.empty(count)
    coeffs[0] = math.exp(gammaln(alpha + 1.0))
    if count > 1:
        j = np.arange(1, count, dtype=float)
        coeffs[1:] = (alpha + 2.0 * j) * np.exp(gammaln(alpha + j) - gammaln(j + 1.0))
    return coeffs


def _miller_margin(cfg):
    """Extra recurrence depth above max(order, x): three orders per requested digit."""
    digits = -math.log10(min(cfg.abs_tol, cfg.rel_tol, 1.0))
    return 3.0 * min(max(digits, 1.0), 16.0) + 1.0


def _miller(alpha, top, x, margin):
    """Rows J_{alpha+k}(x) for k = 0..top, by backward recurrence (x > 0)."""
    reach = max(top, float(np.max(x)))
    start = int(reach + margin + math.sqrt(margin * reach)) + 1
    logger.debug("Miller recurrence alpha=%.6g top=%d start=%d", alpha, top, start)
    coeffs = _neumann_coefficients(alpha, start // 2 + 1)

    f_next = np.zeros_like(x)
    f_cur = np.ones_like(x)
    total = np.zeros_like(x)
    rows = {}
    for k in range(start, -1, -1):
        if k <= top:
            rows[k] = f_cur
        if k % 2 == 0:
            total = total + coeffs[k // 2] * f_cur
        if k == 0:
            break
        f_prev = (2.0 * (alpha + k) / x) * f_cur - f_next
        big = np.abs(f_prev) > _RESCALE
        if np.any(big):
            scale = np.where(big, 1.0 / _RESCALE, 1.0)
            f_prev = f_prev * scale
            f_cur = f_cur * scale
            total = total * scale
            rows = {key: row * scale for key, row in rows.items()}
        f_next, f_cur = f_cur, f_prev

    norm = np.power(0.5 * x, alpha) / total
    return np.stack([rows[k] * norm for k in range(top + 1)])


def bessel_j_ladder(order, count, x, cfg=DEFAULT_BESSEL):
    """J_{order+k}(x) for k = 0..count-1 over an array of arguments.

    Returns an array of shape ``(count,) + x.shape``. ``order`` must be
    non-negative; negative integer orders go through ``bessel_j``.
    """
    _check_order(order)
    if order < 0:
        raise DomainError("bessel_j_ladder needs a non-negative base order")
    if count < 1:
        raise DomainError("count must be >= 1")
    x = _as_arguments(x)
    flat = x.reshape(-1)
    out = np.empty((count, flat.size))

    small = flat <= cfg.series_arg_threshold
    if np.any(small):
        for k in range(count):
            out[k, small] = _series(order + k, flat[small], cfg)
    if not np.all(small):
        base = math.floor(order)
        alpha = order - base
        rows = _miller(alpha, base + count - 1, flat[~small], _miller_margin(cfg))
        out[:, ~small] = rows[base:]
    return out.reshape((count,) + x.shape)


def bessel_j(order, x, cfg=DEFAULT_BESSEL):
    """J_order(x) for real order >= 0 or a negative integer order, x >= 0."""
    order = float(order)
    x = float(x)
    _check_order(order)
    if not math.isfinite(x) or x < 0:
        raise DomainError(f"Bessel argument must be finite and >= 0, got {x!r}")
    if order < 0:
        # J_{-n} = (-1)^n J_n
        n = int(-order)
        value = bessel_j(n, x, cfg)
        return value if n % 2 == 0 else -value
    if x == 0.0:
        return 1.0 if order == 0 else 0.0
    return float(bessel_j_ladder(order, 1, np.array([x]), cfg)[0, 0])


def bessel_j_prime(order, x, cfg=DEFAULT_BESSEL):
    """dJ_order/dx at x > 0."""
    order = float(order)
    x = float(x)
    _check_order(order)
    if not math.isfinite(x) or x <= 0:
        raise DomainError(f"bessel_j_prime needs x > 0, got {x!r}")
    lower = order - 1.0
    if lower >= 0 or lower == math.floor(lower):
        return 0.5 * (bessel_j(lower, x, cfg) - bessel_j(order + 1.0, x, cfg))
    # 0 < order < 1: J_{order-1} is not available, use nu/x J_nu - J_{nu+1}
    return order / x * bessel_j(order, x, cfg) - bessel_j(order + 1.0, x, cfg)


@lru_cache(maxsize=None)
def _legendre(nodes):
    return np.polynomial.legendre.leggauss(nodes)


def _composite_gauss(a, b, panels, nodes):
    base_x, base_w = _legendre(nodes)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    pts = (mid[:, None] + half[:, None] * base_x[None, :]).ravel()
    wts = (half[:, None] * base_w[None, :]).ravel()
    return pts, wts


def bessel_j_oracle(order, x):
    """J_order(x) from the integral representation (slow reference path).

    J_v(x) = 1/pi int_0^pi cos(v t - x sin t) dt
             - sin(v pi)/pi int_0^inf exp(-v t - x sinh t) dt
    """
    order = float(order)
    x = float(x)
    if not math.isfinite(order) or order < 0:
        raise DomainError(f"oracle order must be finite and >= 0, got {order!r}")
    if not math.isfinite(x) or x < 0:
        raise DomainError(f"Bessel argument must be finite and >= 0, got {x!r}")
    if x == 0.0:
        return 1.0 if order == 0 else 0.0

    theta, w = _composite_gauss(0.0, math.pi, _ORACLE_PANELS, _ORACLE_PANEL_NODES)
    value = float(np.dot(w, np.cos(order * theta - x * np.sin(theta)))) / math.pi
    if order == math.floor(order):
        return value

    def excess(t):
        return order * t + x * math.sinh(t) - _TAIL_LOG_CUT

    upper = math.asinh(_TAIL_LOG_CUT / x)
    if order > 0:
        upper = min(upper, _TAIL_LOG_CUT / order)
    cut = brentq(excess, 0.0, upper) if excess(upper) > 0 else upper
    t, wt = _composite_gauss(0.0, cut, _ORACLE_PANELS, _ORACLE_PANEL_NODES)
    tail = float(np.dot(wt, np.exp(-order * t - x * np.sinh(t))))
    return value - math.sin(order * math.pi) / math.pi * tail
