"""Quadrature over u in [0, 1] with the 1/sqrt(1 - u^2) weight, and m-sums.

The substitution u = sin(theta) turns

    int_0^1 f(u) / sqrt(1 - u^2) du   into   int_0^{pi/2} f(sin theta) dtheta,

which has no endpoint singularity and is handled by plain Gauss-Legendre.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import TruncationPolicy
from .errors import ConvergenceError, DomainError, EvaluationError

logger = logging.getLogger(__name__)

# partial sums whose magnitude is below this count as zero
ABS_FLOOR = 1e-300

# Gauss-Legendre weights on (0, pi/2) sum to pi/2 up to rounding
WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class QuadratureRule:
    node_count: int
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if self.node_count < 1:
            raise DomainError("node_count must be positive")
        if len(self.nodes) != self.node_count or len(self.weights) != self.node_count:
            raise DomainError("nodes and weights must both have node_count entries")
        if np.any(np.diff(self.nodes) <= 0):
            raise DomainError("quadrature nodes must be strictly increasing")
        if np.any(self.weights <= 0):
            raise DomainError("quadrature weights must be positive")
        if not (self.nodes[0] > 0 and self.nodes[-1] < math.pi / 2):
            raise DomainError("quadrature nodes must lie inside (0, pi/2)")
        if abs(float(np.sum(self.weights)) - math.pi / 2) > WEIGHT_SUM_TOL:
            raise DomainError("quadrature weights must sum to pi/2")

    @property
    def u(self):
        """Nodes mapped back to u = sin(theta)."""
        return np.sin(self.nodes)


@lru_cache(maxsize=None)
def gauss_legendre_rule(node_count):
    """Gauss-Legendre rule on (0, pi/2); cached, so safe to share across threads."""
    node_count = int(node_count)
    if node_count < 1:
        raise DomainError(f"node_count must be positive, got {node_count}")
    x, w = np.polynomial.legendre.leggauss(node_count)
    quarter = math.pi / 4.0
    nodes = quarter * (x + 1.0)
    weights = quarter * w
    nodes.setflags(write=False)
    weights.setflags(write=False)
    logger.debug("built %d-node Gauss-Legendre rule on (0, pi/2)", node_count)
    return QuadratureRule(node_count, nodes, weights)


def integrate_weighted(f, rule):
    """int_0^1 f(u)/sqrt(1-u^2) du.

    ``f`` is called once with the array of u-nodes and must return an array
    of the same shape (scalar functions are vectorised with numpy).
    """
    u = rule.u
    try:
        values = np.asarray(f(u), dtype=float)
    except (TypeError, ValueError):
        values = np.array([float(f(float(ui))) for ui in u])
    if values.shape != u.shape:
        values = np.broadcast_to(values, u.shape)
    bad = ~np.isfinite(values)
    if np.any(bad):
        index = int(np.argmax(bad))
        raise EvaluationError(
            f"integrand is not finite at u={u[index]!r}", location=float(u[index])
        )
    return float(np.dot(rule.weights, values))


@dataclass(frozen=True)
class SumReport:
    value: float
    terms_used: int
    converged: bool
    last_term_magnitude: float


def sum_symmetric_m(term, policy=TruncationPolicy()):
    """term(0) + 2 * sum_{m>=1} term(m) for summands depending on |m| only.

    Stops once ``policy.consecutive_small`` successive terms are each below
    ``rel_tol`` times the partial sum. Returns a SumReport with
    ``converged=False`` if ``m_max`` is reached first; callers decide
    whether that is an error.
    """
    first = float(term(0))
    if not math.isfinite(first):
        raise EvaluationError(f"summand is not finite at m=0: {first!r}", location=0)
    total = first
    small_run = 0
    magnitude = abs(first)
    for m in range(1, policy.m_max + 1):
        value = float(term(m))
        if not math.isfinite(value):
            raise EvaluationError(f"summand is not finite at m={m}: {value!r}", location=m)
        total += 2.0 * value
        magnitude = abs(value)
        if magnitude <= policy.rel_tol * abs(total) or abs(total) < ABS_FLOOR:
            small_run += 1
        else:
            small_run = 0
        if small_run >= policy.consecutive_small:
            logger.debug("m-sum converged after %d terms (last |term|=%.3g)", m + 1, magnitude)
            return SumReport(total, m + 1, True, magnitude)
    logger.debug("m-sum hit m_max=%d (last |term|=%.3g)", policy.m_max, magnitude)
    return SumReport(total, policy.m_max + 1, False, magnitude)


def require_converged(report, **context):
    """Return report.value or raise ConvergenceError carrying the report."""
    if not report.converged:
        where = ", ".join(f"{k}={v!r}" for k, v in context.items())
        raise ConvergenceError(
            f"m-sum did not converge within {report.terms_used - 1} terms ({where})",
            report=report,
            context=context,
        )
    return report.value
