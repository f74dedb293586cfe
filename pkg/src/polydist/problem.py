"""JSON problem files and reports. Complex numbers are always ``[re, im]`` pairs.

Problem file::

    {
      "n": 3, "m": 2,
      "coefficients": [A_0, ..., A_m],   # each n rows of n [re, im] pairs
      "weights": [1, 1, 1],              # optional, default all ones
      "mu": [3, 0],
      "gamma": {"gamma_max": 10, "grid": 200, "gamma_tol": 1e-10,
                "coalescence_rtol": 1e-6},  # optional
      "mode": "auto"                       # optional
    }

A coefficient may also be given as a flat row-major list of ``n*n`` pairs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .analysis import Analysis, normalize_mode
from .errors import InvalidInput, ProblemFormatError
from .matpoly import MatrixPolynomial, WeightSet
from .pencil import GammaSearchOptions

REPORT_FORMAT = "polydist.report.v1"


@dataclass
class ProblemSpec:
    P: MatrixPolynomial
    mu: complex | None
    weights: WeightSet
    options: GammaSearchOptions
    mode: str
    reference: MatrixPolynomial | None = None


def parse_complex(value, fieldname):
    if isinstance(value, bool):
        raise ProblemFormatError(fieldname, "expected a number or an [re, im] pair")
    if isinstance(value, (int, float)):
        z = complex(value)
    elif isinstance(value, (list, tuple)) and len(value) == 2:
        re, im = value
        if not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in (re, im)):
            raise ProblemFormatError(fieldname, "pair entries must be numbers")
        z = complex(re, im)
    else:
        raise ProblemFormatError(fieldname, "expected an [re, im] pair")
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ProblemFormatError(fieldname, "non-finite value")
    return z


def parse_matrix(value, n, fieldname):
    if not isinstance(value, list):
        raise ProblemFormatError(fieldname, "expected a list of rows")
    if len(value) == n * n and n > 1 and all(
        isinstance(x, list) and len(x) == 2 and not isinstance(x[0], list) for x in value
    ):
        value = [value[i * n : (i + 1) * n] for i in range(n)]
    if len(value) != n:
        raise ProblemFormatError(fieldname, f"expected {n} rows, got {len(value)}")
    out = np.empty((n, n), dtype=complex)
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != n:
            raise ProblemFormatError(f"{fieldname}[{i}]", f"expected a row of {n} entries")
        for k, x in enumerate(row):
            out[i, k] = parse_complex(x, f"{fieldname}[{i}][{k}]")
    return out


def _require(data, key, where=""):
    if key not in data:
        raise ProblemFormatError(where + key, "missing")
    return data[key]


def parse_polynomial(data, key="coefficients"):
    n = _require(data, "n")
    m = _require(data, "m")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ProblemFormatError("n", "must be a positive integer")
    if not isinstance(m, int) or isinstance(m, bool) or m < 0:
        raise ProblemFormatError("m", "must be a nonnegative integer")
    coeffs = _require(data, key)
    if not isinstance(coeffs, list):
        raise ProblemFormatError(key, "expected a list of coefficient matrices")
    if len(coeffs) != m + 1:
        missing = f"{key}[{len(coeffs)}]" if len(coeffs) < m + 1 else key
        raise ProblemFormatError(missing, f"expected {m + 1} coefficients A_0..A_{m}, got {len(coeffs)}")
    mats = [parse_matrix(c, n, f"{key}[{j}]") for j, c in enumerate(coeffs)]
    try:
        return MatrixPolynomial(mats)
    except InvalidInput as exc:
        raise ProblemFormatError(key, str(exc)) from None


def parse_problem(data) -> ProblemSpec:
    if not isinstance(data, dict):
        raise ProblemFormatError("<root>", "expected a JSON object")
    P = parse_polynomial(data)
    mu = parse_complex(data["mu"], "mu") if "mu" in data else None
    if "weights" in data and data["weights"] is not None:
        wv = data["weights"]
        if not isinstance(wv, list) or len(wv) != P.m + 1:
            raise ProblemFormatError("weights", f"expected a list of {P.m + 1} numbers")
        try:
            weights = WeightSet(tuple(wv))
        except (InvalidInput, TypeError, ValueError) as exc:
            raise ProblemFormatError("weights", str(exc)) from None
    else:
        weights = WeightSet.ones(P.m)
    gopts = data.get("gamma") or {}
    if not isinstance(gopts, dict):
        raise ProblemFormatError("gamma", "expected an object")
    known = {f.name for f in fields(GammaSearchOptions)}
    for k in gopts:
        if k not in known:
            raise ProblemFormatError(f"gamma.{k}", "unknown option")
    try:
        options = GammaSearchOptions(**gopts)
    except (InvalidInput, TypeError) as exc:
        raise ProblemFormatError("gamma", str(exc)) from None
    try:
        mode = normalize_mode(data.get("mode", "auto"))
    except ValueError as exc:
        raise ProblemFormatError("mode", str(exc)) from None
    reference = None
    if "reference_coefficients" in data:
        reference = parse_polynomial(data, "reference_coefficients")
    return ProblemSpec(P, mu, weights, options, mode, reference)


def load_problem(path) -> ProblemSpec:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ProblemFormatError("<file>", f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFormatError("<file>", f"invalid JSON: {exc}") from None
    if isinstance(data, dict) and data.get("format") == REPORT_FORMAT:
        return problem_from_report(data)
    return parse_problem(data)


def problem_from_report(report) -> ProblemSpec:
    """Verification problem for the ``Q`` recorded in a report."""
    q = report.get("Q")
    if not q:
        raise ProblemFormatError("Q", "report has no perturbed polynomial")
    data = dict(q)
    data["mu"] = report["mu"]
    data["reference_coefficients"] = report["P"]["coefficients"]
    return parse_problem(data)


# -- serialization -------------------------------------------------------


def cpair(z):
    z = complex(z)
    return [float(z.real), float(z.imag)]


def cmatrix(a):
    return [[cpair(x) for x in row] for row in np.asarray(a)]


def cvector(x):
    return [cpair(z) for z in np.asarray(x)]


def polynomial_dict(P: MatrixPolynomial):
    return {"n": P.n, "m": P.m, "coefficients": [cmatrix(a) for a in P.coeffs]}


def verification_dict(v):
    return {
        "verdict": v.verdict,
        "multiple": v.is_multiple,
        "smin_ratio": v.smin_ratio,
        "det": cpair(v.det),
        "det_slope": cpair(v.det_slope),
        "slope_scale": v.slope_scale,
        "slope_residual": v.slope_residual,
        "geometric_multiplicity": v.geometric_multiplicity,
        "tol": v.tol,
    }


def _diag_dict(d):
    if d is None:
        return None
    return {"slope": d.slope, "imag_residue": d.imag_residue, "uv_gram_gap": d.uv_gram_gap}


def report_dict(a: Analysis):
    h = a.hypotheses
    out = {
        "format": REPORT_FORMAT,
        "mu": cpair(a.mu),
        "mode": a.mode,
        "weights": list(a.weights.weights),
        "P": polynomial_dict(a.P),
        "hypotheses": {
            "dprime_smin_ratio": h.dp_smin_ratio,
            "dprime_violated": h.dp_violated,
            "p_smin": h.p_smin,
            "p_smin_ratio": h.p_smin_ratio,
            "mu_is_eigenvalue": h.mu_is_eigenvalue,
        },
    }
    rec = a.record
    if rec is not None:
        out["gamma_search"] = {
            "gamma_star": rec.gamma_star,
            "s_star": rec.s_star,
            "gap": rec.gap,
            "gap_next": rec.gap_next,
            "coalesced": rec.coalesced,
            "slope_a": rec.slope_a,
            "slope_b": rec.slope_b,
            "slope_imag": rec.slope_imag,
            "gamma_max_used": rec.gamma_max_used,
        }
        out["pre_diagnostics"] = _diag_dict(a.pre_diagnostics)
    out["path"] = a.path
    c = a.correction
    if c is not None:
        out["correction"] = {
            "M": cmatrix(c.M),
            "hermitian_residual": c.hermitian_residual,
            "eigenvalues": [c.lam1, c.lam2],
            "xi": c.xi,
            "eta": c.eta,
            "alpha": cpair(c.alpha),
            "beta": cpair(c.beta),
            "form_residual": c.form_residual,
            "pair_residual": c.pair_residual,
            "u": cvector(c.u),
            "v": cvector(c.v),
            "post_diagnostics": _diag_dict(c.diagnostics),
        }
    r = a.result
    if r is not None:
        out["perturbation"] = {
            "phi": cpair(r.phi),
            "delta": cmatrix(r.delta),
            "delta_rank": r.delta_rank,
            "delta_norm": r.delta_norm,
            "delta_coefficients": [cmatrix(d) for d in r.delta_coeffs],
            "delta_coefficient_norms": r.coeff_norms,
            "s_star": r.s_star,
        }
        out["Q"] = polynomial_dict(r.Q)
        out["verification"] = verification_dict(r.verification)
    out["error"] = a.error.to_dict() if a.error is not None else None
    out["warnings"] = list(a.warnings)
    return out


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=True) + "\n"
