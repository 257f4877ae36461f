"""Numerics configuration and settings loading.

Settings are layered: built-in defaults, then an optional key=value file
(parsed with python-dotenv), then command-line overrides. The environment
variable ``CONIC_QED_THREADS`` caps the worker pool last.
"""

import logging
import math
import os
from dataclasses import dataclass, field, replace

from dotenv import dotenv_values, load_dotenv

from .errors import DomainError

logger = logging.getLogger(__name__)

THREADS_ENV = "CONIC_QED_THREADS"


@dataclass(frozen=True)
class BesselConfig:
    series_max_terms: int = 60
    series_arg_threshold: float = 12.0
    abs_tol: float = 1e-13
    rel_tol: float = 1e-12

    def __post_init__(self):
        if int(self.series_max_terms) < 1:
            raise DomainError("series_max_terms must be >= 1")
        for name in ("series_arg_threshold", "abs_tol", "rel_tol"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and > 0, got {value!r}")


@dataclass(frozen=True)
class TruncationPolicy:
    """Stopping rule for the symmetric m-sums."""

    rel_tol: float = 1e-10
    consecutive_small: int = 3
    m_max: int = 2000

    def __post_init__(self):
        if not (math.isfinite(self.rel_tol) and self.rel_tol > 0):
            raise DomainError(f"rel_tol must be finite and > 0, got {self.rel_tol!r}")
        if self.consecutive_small < 2:
            raise DomainError("consecutive_small must be >= 2")
        if self.m_max < self.consecutive_small:
            raise DomainError("m_max must be >= consecutive_small")


@dataclass(frozen=True)
class NumericsConfig:
    nodes: int = 128
    truncation: TruncationPolicy = field(default_factory=TruncationPolicy)
    bessel: BesselConfig = field(default_factory=BesselConfig)

    def __post_init__(self):
        if self.nodes < 2:
            raise DomainError(f"nodes must be >= 2, got {self.nodes!r}")

    def with_overrides(self, nodes=None, m_max=None, rel_tol=None, consecutive_small=None):
        """Copy of this config with the given numerics replaced (None keeps)."""
        truncation = self.truncation
        changes = {}
        if m_max is not None:
            changes["m_max"] = int(m_max)
        if rel_tol is not None:
            changes["rel_tol"] = float(rel_tol)
        if consecutive_small is not None:
            changes["consecutive_small"] = int(consecutive_small)
        if changes:
            truncation = replace(truncation, **changes)
        return replace(
            self,
            nodes=int(nodes) if nodes is not None else self.nodes,
            truncation=truncation,
        )

    def describe(self):
        return {
            "nodes": self.nodes,
            "rel_tol": self.truncation.rel_tol,
            "consecutive_small": self.truncation.consecutive_small,
            "m_max": self.truncation.m_max,
        }


DEFAULT_NUMERICS = NumericsConfig()

_FILE_KEYS = {
    "nodes": int,
    "m_max": int,
    "rel_tol": float,
    "consecutive_small": int,
    "workers": int,
}


def read_config_file(path):
    """Parse a key=value config file; unknown keys are rejected."""
    if not os.path.exists(path):
        raise DomainError(f"config file not found: {path}")
    raw = dotenv_values(path)
    values = {}
    for key, text in raw.items():
        name = key.strip().lower().replace("-", "_")
        if name not in _FILE_KEYS:
            raise DomainError(f"unknown config key {key!r} in {path}")
        if text is None or text.strip() == "":
            continue
        try:
            values[name] = _FILE_KEYS[name](text.strip())
        except ValueError as e:
            raise DomainError(f"bad value for {key!r} in {path}: {text!r}") from e
    logger.debug("read %d settings from %s", len(values), path)
    return values


def thread_cap():
    """Worker cap from CONIC_QED_THREADS, or None when unset."""
    load_dotenv()
    text = os.getenv(THREADS_ENV)
    if text is None or text.strip() == "":
        return None
    try:
        cap = int(text)
    except ValueError as e:
        raise DomainError(f"{THREADS_ENV} must be an integer, got {text!r}") from e
    if cap < 1:
        raise DomainError(f"{THREADS_ENV} must be >= 1, got {cap}")
    return cap


def load_settings(path=None, **overrides):
    """Resolve (NumericsConfig, workers) from defaults, file and overrides.

    ``overrides`` holds flag values; ``None`` means the flag was not given.
    """
    values = read_config_file(path) if path else {}
    values.update({k: v for k, v in overrides.items() if v is not None})

    numerics = DEFAULT_NUMERICS.with_overrides(
        nodes=values.get("nodes"),
        m_max=values.get("m_max"),
        rel_tol=values.get("rel_tol"),
        consecutive_small=values.get("consecutive_small"),
    )
    workers = values.get("workers") or os.cpu_count() or 1
    cap = thread_cap()
    if cap is not None:
        workers = min(workers, cap)
    return numerics, max(1, int(workers))
