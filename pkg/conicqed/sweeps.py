"""Parameter sweeps behind the command-line front end.

Each sweep command turns a ``SweepSpec`` into a pandas DataFrame: the
independent variable first, then one value column per series. Rows are
evaluated in a process pool and collected with ``Executor.map``, which
keeps input order, so the worker count never changes the table.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .config import DEFAULT_NUMERICS
from .errors import ConvergenceError, EvaluationError, UsageError
from .opse import Orientation, purcell_factor
from .tpse import spectral_enhancement_ss, total_rate_ratio

logger = logging.getLogger(__name__)

COMMANDS = (
    "opse-vs-distance",
    "opse-vs-q",
    "tpse-spectrum",
    "tpse-vs-distance",
    "tpse-vs-q",
    "tpse-contour",
    "total-rate",
    "selftest",
)

ORIENTATION_CHOICES = ("z", "rho", "phi", "iso", "all")


@dataclass
class SweepSpec:
    command: str
    q_values: list = field(default_factory=list)
    keg_rho_values: list = field(default_factory=list)
    omega_frac_values: list = field(default_factory=list)
    grid_points: int = 100
    output_path: str = "-"
    rho_min: float = 0.0
    rho_max: float = 20.0
    q_min: float = 1.0
    q_max: float = 5.0
    orientation: str = "z"
    n_omega: int = 64
    nodes: int = None
    m_max: int = None
    rel_tol: float = None
    config_path: str = None
    summary: bool = False
    quick: bool = False
    report_path: str = None

    def validate(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.orientation not in ORIENTATION_CHOICES:
            raise UsageError(f"unknown orientation {self.orientation!r}")
        if self.command == "selftest":
            return
        if self.grid_points < 2:
            raise UsageError(f"--points must be >= 2, got {self.grid_points}")
        if self.command in ("opse-vs-distance", "tpse-vs-distance", "tpse-contour", "total-rate"):
            if not (0 <= self.rho_min < self.rho_max) or not math.isfinite(self.rho_max):
                raise UsageError("need 0 <= --rho-min < --rho-max")
        if self.command in ("opse-vs-q", "tpse-vs-q"):
            if not (1 <= self.q_min < self.q_max) or not math.isfinite(self.q_max):
                raise UsageError("need 1 <= --q-min < --q-max")
        required = {
            "opse-vs-distance": ("q_values",),
            "opse-vs-q": ("keg_rho_values",),
            "tpse-spectrum": ("q_values", "keg_rho_values"),
            "tpse-vs-distance": ("q_values", "omega_frac_values"),
            "tpse-vs-q": ("keg_rho_values", "omega_frac_values"),
            "tpse-contour": ("q_values",),
            "total-rate": ("q_values",),
        }[self.command]
        for name in required:
            if not getattr(self, name):
                flag = {"q_values": "--q", "keg_rho_values": "--keg-rho", "omega_frac_values": "--omega-frac"}[name]
                raise UsageError(f"{self.command} needs {flag}")
        if self.command == "tpse-contour" and len(self.q_values) != 1:
            raise UsageError("tpse-contour takes exactly one --q value")
        if any(not (0 < f < 1) for f in self.omega_frac_values):
            raise UsageError("--omega-frac values must lie strictly inside (0, 1)")
        if self.command.startswith("tpse") and self.orientation not in ("z", "all"):
            logger.warning("--orientation is ignored by %s", self.command)


def label(value):
    """Compact, stable number formatting for column names."""
    return f"{value:g}"


def distance_grid(spec):
    return np.linspace(spec.rho_min, spec.rho_max, spec.grid_points)


def q_grid(spec):
    return np.linspace(spec.q_min, spec.q_max, spec.grid_points)


def omega_grid(points):
    """Interior frequency grid i/(points+1); row reversal maps f to 1 - f."""
    return np.arange(1, points + 1) / (points + 1.0)


def _orientations(spec):
    if spec.orientation == "all":
        return [Orientation.Z, Orientation.RHO, Orientation.PHI, Orientation.ISO]
    return [Orientation(spec.orientation)]


def _with_context(error, **context):
    where = ", ".join(f"{k}={v!r}" for k, v in context.items())
    return ConvergenceError(f"{error} [at {where}]", report=getattr(error, "report", None), context=context)


# Row workers live at module level so the process pool can pickle them.

def _opse_distance_row(task):
    keg_rho, orients, qs, cfg = task
    row = []
    for orient in orients:
        for q in qs:
            try:
                row.append(purcell_factor(orient, q, keg_rho, cfg))
            except ConvergenceError as e:
                raise _with_context(e, q=q, keg_rho=keg_rho, orientation=orient.value) from e
    return row


def _opse_q_row(task):
    q, orients, distances, cfg = task
    row = []
    for orient in orients:
        for keg_rho in distances:
            try:
                row.append(purcell_factor(orient, q, keg_rho, cfg))
            except ConvergenceError as e:
                raise _with_context(e, q=q, keg_rho=keg_rho, orientation=orient.value) from e
    return row


def _enhancement_row(task):
    pairs, cfg = task
    row = []
    for q, keg_rho, omega_frac in pairs:
        try:
            row.append(spectral_enhancement_ss(q, keg_rho, omega_frac, cfg))
        except ConvergenceError as e:
            raise _with_context(e, q=q, keg_rho=keg_rho, omega_frac=omega_frac) from e
    return row


def _total_rate_row(task):
    keg_rho, qs, n_omega, cfg = task
    row = []
    for q in qs:
        try:
            row.append(total_rate_ratio(q, keg_rho, cfg, n_omega=n_omega))
        except ConvergenceError as e:
            raise _with_context(e, q=q, keg_rho=keg_rho) from e
    return row


def evaluate_rows(worker, tasks, workers=1):
    """Apply ``worker`` to every task, in order, optionally in a process pool."""
    tasks = list(tasks)
    if workers <= 1 or len(tasks) < 2:
        return [worker(task) for task in tasks]
    chunk = max(1, len(tasks) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker, tasks, chunksize=chunk))


def _frame(index_name, index_values, columns, rows):
    data = np.asarray(rows, dtype=float).reshape(len(index_values), len(columns))
    if not np.all(np.isfinite(data)):
        bad = np.argwhere(~np.isfinite(data))[0]
        raise EvaluationError(
            f"non-finite value in column {columns[bad[1]]} at {index_name}={index_values[bad[0]]!r}",
            location=float(index_values[bad[0]]),
        )
    frame = pd.DataFrame(data, columns=columns)
    frame.insert(0, index_name, np.asarray(index_values, dtype=float))
    return frame


def opse_vs_distance(spec, cfg=DEFAULT_NUMERICS, workers=1):
    """Purcell factors against k_eg rho, with a q = 1 control series."""
    qs = [1.0] + [q for q in spec.q_values if q != 1.0]
    orients = _orientations(spec)
    distances = distance_grid(spec)
    columns = [f"G{o.value}_q{label(q)}" for o in orients for q in qs]
    rows = evaluate_rows(_opse_distance_row, [(float(x), orients, qs, cfg) for x in distances], workers)
    return _frame("keg_rho", distances, columns, rows)


def opse_vs_q(spec, cfg=DEFAULT_NUMERICS, workers=1):
    orients = _orientations(spec)
    qs = q_grid(spec)
    columns = [f"G{o.value}_kr{label(x)}" for o in orients for x in spec.keg_rho_values]
    rows = evaluate_rows(_opse_q_row, [(float(q), orients, spec.keg_rho_values, cfg) for q in qs], workers)
    return _frame("q", qs, columns, rows)


def tpse_spectrum(spec, cfg=DEFAULT_NUMERICS, workers=1):
    series = [(q, x) for q in spec.q_values for x in spec.keg_rho_values]
    fracs = omega_grid(spec.grid_points)
    columns = [f"gamma_q{label(q)}_kr{label(x)}" for q, x in series]
    tasks = [([(q, x, float(f)) for q, x in series], cfg) for f in fracs]
    return _frame("omega_frac", fracs, columns, evaluate_rows(_enhancement_row, tasks, workers))


def tpse_vs_distance(spec, cfg=DEFAULT_NUMERICS, workers=1):
    series = [(q, f) for q in spec.q_values for f in spec.omega_frac_values]
    distances = distance_grid(spec)
    columns = [f"gamma_q{label(q)}_w{label(f)}" for q, f in series]
    tasks = [([(q, float(x), f) for q, f in series], cfg) for x in distances]
    return _frame("keg_rho", distances, columns, evaluate_rows(_enhancement_row, tasks, workers))


def tpse_vs_q(spec, cfg=DEFAULT_NUMERICS, workers=1):
    series = [(x, f) for x in spec.keg_rho_values for f in spec.omega_frac_values]
    qs = q_grid(spec)
    columns = [f"gamma_kr{label(x)}_w{label(f)}" for x, f in series]
    tasks = [([(float(q), x, f) for x, f in series], cfg) for q in qs]
    return _frame("q", qs, columns, evaluate_rows(_enhancement_row, tasks, workers))


def tpse_contour(spec, cfg=DEFAULT_NUMERICS, workers=1):
    """Long format (omega_frac, keg_rho, enhancement), omega varying slowest."""
    q = spec.q_values[0]
    fracs = omega_grid(spec.grid_points)
    distances = distance_grid(spec)
    tasks = [([(q, float(x), float(f)) for x in distances], cfg) for f in fracs]
    rows = evaluate_rows(_enhancement_row, tasks, workers)
    values = np.asarray(rows, dtype=float).reshape(-1)
    if not np.all(np.isfinite(values)):
        raise EvaluationError("non-finite enhancement in contour grid")
    return pd.DataFrame(
        {
            "omega_frac": np.repeat(fracs, len(distances)),
            "keg_rho": np.tile(distances, len(fracs)),
            "enhancement": values,
        }
    )


def total_rate(spec, cfg=DEFAULT_NUMERICS, workers=1):
    distances = distance_grid(spec)
    columns = [f"total_q{label(q)}" for q in spec.q_values]
    tasks = [(float(x), spec.q_values, spec.n_omega, cfg) for x in distances]
    return _frame("keg_rho", distances, columns, evaluate_rows(_total_rate_row, tasks, workers))


BUILDERS = {
    "opse-vs-distance": opse_vs_distance,
    "opse-vs-q": opse_vs_q,
    "tpse-spectrum": tpse_spectrum,
    "tpse-vs-distance": tpse_vs_distance,
    "tpse-vs-q": tpse_vs_q,
    "tpse-contour": tpse_contour,
    "total-rate": total_rate,
}


def build_frame(spec, cfg=DEFAULT_NUMERICS, workers=1):
    """DataFrame for one sweep command."""
    spec.validate()
    try:
        builder = BUILDERS[spec.command]
    except KeyError:
        raise UsageError(f"{spec.command} does not produce a sweep table") from None
    logger.info("sweep %s: %d points, %d worker(s)", spec.command, spec.grid_points, workers)
    frame = builder(spec, cfg, workers)
    logger.info("sweep %s finished: %d rows x %d columns", spec.command, *frame.shape)
    return frame

