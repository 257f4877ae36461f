import logging
import os
import sys

from flask import Flask, jsonify, request
from werkzeug.exceptions import HTTPException

# The package lives one directory up from api/
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from conicqed.config import load_settings  # noqa: E402
from conicqed.errors import ConvergenceError, DomainError, EvaluationError  # noqa: E402
from conicqed.opse import MU_LIMIT, StringBackground, purcell_all  # noqa: E402
from conicqed.sweeps import omega_grid  # noqa: E402
from conicqed.tpse import spectral_enhancement_ss, total_rate_ratio  # noqa: E402

logger = logging.getLogger(__name__)

app = Flask(__name__)

# Numerics come from CONIC_QED_CONFIG (key=value file) if set
numerics, _ = load_settings(os.getenv("CONIC_QED_CONFIG") or None)

MAX_POINTS = 1000


@app.errorhandler(DomainError)
def domain_error(e):
    logger.warning("rejected %s %s: %s", request.path, dict(request.args), e)
    return jsonify({"error": str(e)}), 400


@app.errorhandler(ConvergenceError)
@app.errorhandler(EvaluationError)
def numerics_error(e):
    logger.warning("numerical failure on %s %s: %s", request.path, dict(request.args), e)
    return jsonify({"error": str(e)}), 422


@app.errorhandler(Exception)
def unexpected_error(e):
    if isinstance(e, HTTPException):
        return jsonify({"error": e.description}), e.code
    logger.exception("unexpected failure on %s", request.path)
    return jsonify({"error": str(e)}), 500


def _required_float(name):
    value = request.args.get(name, type=float)
    if value is None:
        raise DomainError(f"query parameter '{name}' is required and must be a number")
    return value


@app.route("/api/health")
def health():
    """Health check endpoint"""
    return jsonify({"status": "ok", "numerics": numerics.describe()})


@app.route("/api/purcell")
def purcell():
    """Purcell factors for all orientations at (q, keg_rho)"""
    q = _required_float("q")
    keg_rho = _required_float("keg_rho")
    return jsonify(purcell_all(q, keg_rho, numerics).as_dict())


@app.route("/api/spectrum")
def spectrum():
    """s -> s spectral enhancement on the interior grid i/(points+1)"""
    q = _required_float("q")
    keg_rho = _required_float("keg_rho")
    points = request.args.get("points", default=99, type=int)
    if not 2 <= points <= MAX_POINTS:
        raise DomainError(f"points must lie in [2, {MAX_POINTS}], got {points}")
    fracs = omega_grid(points)
    items = [
        {"omega_frac": float(f), "enhancement": spectral_enhancement_ss(q, keg_rho, float(f), numerics)}
        for f in fracs
    ]
    return jsonify({"q": q, "keg_rho": keg_rho, "count": len(items), "items": items})


@app.route("/api/total-rate")
def total_rate():
    """Total two-photon rate relative to free space"""
    q = _required_float("q")
    keg_rho = _required_float("keg_rho")
    n_omega = request.args.get("n_omega", default=64, type=int)
    ratio = total_rate_ratio(q, keg_rho, numerics, n_omega=n_omega)
    return jsonify({"q": q, "keg_rho": keg_rho, "n_omega": n_omega, "ratio": ratio})


@app.route("/api/background")
def background():
    """Convert between string tension mu (kg/m) and deficit parameter q"""
    mu = request.args.get("mu", type=float)
    q = request.args.get("q", type=float)
    if (mu is None) == (q is None):
        raise DomainError("give exactly one of 'mu' or 'q'")
    string = StringBackground.from_mu(mu) if mu is not None else StringBackground(q)
    return jsonify(
        {
            "q": string.q,
            "mu": string.mu,
            "deficit_angle": string.deficit_angle,
            "mu_limit": MU_LIMIT,
        }
    )


if __name__ == "__main__":
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    logger.info("Starting Flask API...")
    app.run(debug=True, host="0.0.0.0", port=5000)
