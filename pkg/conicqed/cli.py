"""Command-line front end: CSV sweeps and the self-test.

    python main.py opse-vs-distance --q 1.5,2,3 --rho-max 20 --points 400
    python main.py tpse-spectrum --q 2.5 --keg-rho 2,4 --points 101 --out fig5.csv
    python main.py selftest --quick

Exit codes: 0 success, 1 self-test failure, 2 usage error, 3 numerical
failure (convergence or non-finite value, partial output removed).
"""

import argparse
import logging
import sys

from .config import load_settings
from .errors import ConicQEDError, ConvergenceError, DomainError, EvaluationError, UsageError
from .main_functions import header_lines, save_to_file, write_summary, write_sweep_csv
from .selftest import format_report, run_selftest
from .sweeps import COMMANDS, ORIENTATION_CHOICES, SweepSpec, build_frame

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_SELFTEST = 1
EXIT_USAGE = 2
EXIT_NUMERICS = 3

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _float_list(text):
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser():
    parser = _Parser(prog="conicqed", description="Spontaneous emission near a cosmic string: CSV sweeps.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--q", type=_float_list, default=[], help="comma-separated deficit parameters q >= 1")
    parser.add_argument("--keg-rho", type=_float_list, default=[], help="comma-separated distances k_eg rho")
    parser.add_argument("--omega-frac", type=_float_list, default=[], help="comma-separated omega/omega_eg in (0, 1)")
    parser.add_argument("--rho-min", type=float, default=0.0)
    parser.add_argument("--rho-max", type=float, default=20.0)
    parser.add_argument("--q-min", type=float, default=1.0)
    parser.add_argument("--q-max", type=float, default=5.0)
    parser.add_argument("--points", type=int, default=100, help="grid size along the swept axis")
    parser.add_argument("--orientation", choices=ORIENTATION_CHOICES, default="z")
    parser.add_argument("--n-omega", type=int, default=64, help="frequency nodes for total-rate")
    parser.add_argument("--out", default="-", help="output CSV path ('-' for stdout)")
    parser.add_argument("--nodes", type=int, help="Gauss-Legendre nodes")
    parser.add_argument("--m-max", type=int, help="hard cap on the m-sum")
    parser.add_argument("--rel-tol", type=float, help="m-sum relative truncation tolerance")
    parser.add_argument("--config", help="key=value numerics file (flags win)")
    parser.add_argument("--summary", action="store_true", help="also write describe() statistics")
    parser.add_argument("--quick", action="store_true", help="selftest: analytic checks only")
    parser.add_argument("--report", help="selftest: also write the results as JSON")
    parser.add_argument("-v", "--verbose", action="store_true", help="DEBUG logging on stderr")
    return parser


def parse_spec(argv=None):
    """(SweepSpec, verbose) from command-line arguments."""
    args = build_parser().parse_args(argv)
    spec = SweepSpec(
        command=args.command,
        q_values=args.q,
        keg_rho_values=args.keg_rho,
        omega_frac_values=args.omega_frac,
        grid_points=args.points,
        output_path=args.out,
        rho_min=args.rho_min,
        rho_max=args.rho_max,
        q_min=args.q_min,
        q_max=args.q_max,
        orientation=args.orientation,
        n_omega=args.n_omega,
        nodes=args.nodes,
        m_max=args.m_max,
        rel_tol=args.rel_tol,
        config_path=args.config,
        summary=args.summary,
        quick=args.quick,
        report_path=args.report,
    )
    return spec, args.verbose


def _settings(spec):
    try:
        return load_settings(spec.config_path, nodes=spec.nodes, m_max=spec.m_max, rel_tol=spec.rel_tol)
    except DomainError as e:
        raise UsageError(str(e)) from e


def _metadata(spec):
    fields = {
        "q": spec.q_values,
        "keg_rho": spec.keg_rho_values,
        "omega_frac": spec.omega_frac_values,
        "points": spec.grid_points,
        "orientation": spec.orientation,
    }
    if spec.command in ("opse-vs-distance", "tpse-vs-distance", "tpse-contour", "total-rate"):
        fields["rho_range"] = [spec.rho_min, spec.rho_max]
    if spec.command in ("opse-vs-q", "tpse-vs-q"):
        fields["q_range"] = [spec.q_min, spec.q_max]
    if spec.command == "total-rate":
        fields["n_omega"] = spec.n_omega
    return fields


def _selftest(spec, numerics):
    results = run_selftest(numerics, quick=spec.quick)
    print(format_report(results))
    if spec.report_path:
        save_to_file([r.as_dict() for r in results], spec.report_path)
    return EXIT_OK if all(r.passed for r in results) else EXIT_SELFTEST


def run(spec):
    """Execute one command; returns the process exit status."""
    try:
        spec.validate()
        numerics, workers = _settings(spec)
    except UsageError as e:
        logger.error("usage error: %s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    if spec.command == "selftest":
        return _selftest(spec, numerics)

    try:
        frame = build_frame(spec, numerics, workers)
        header = header_lines(spec.command, _metadata(spec), numerics.describe())
        write_sweep_csv(frame, spec.output_path, header)
        if spec.summary:
            write_summary(frame, spec.output_path, axes=2 if spec.command == "tpse-contour" else 1)
    except (ConvergenceError, EvaluationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERICS
    except (UsageError, DomainError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def main(argv=None):
    try:
        spec, verbose = parse_spec(argv)
    except UsageError as e:
        build_parser().print_usage(sys.stderr)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING, format=LOG_FORMAT, stream=sys.stderr)
    try:
        return run(spec)
    except ConicQEDError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERICS
