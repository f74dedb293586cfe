"""End-to-end pipeline: precheck, gamma search, optional correction, perturbation."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import corrector, pencil, perturbation
from .errors import PolydistError
from .matpoly import MatrixPolynomial, WeightSet

MODES = ("auto", "single", "corrected")
_MODE_ALIASES = {
    "auto": "auto",
    "single": "single",
    "force-single-pair": "single",
    "corrected": "corrected",
    "force-corrected": "corrected",
}


def normalize_mode(mode: str) -> str:
    try:
        return _MODE_ALIASES[mode]
    except KeyError:
        raise ValueError(f"unknown mode {mode!r}; expected one of {sorted(_MODE_ALIASES)}") from None


@dataclass
class Analysis:
    P: MatrixPolynomial
    weights: WeightSet
    mu: complex
    mode: str
    hypotheses: perturbation.HypothesisReport | None = None
    record: pencil.GammaStarRecord | None = None
    pre_diagnostics: corrector.LemmaDiagnostics | None = None
    path: str | None = None  # "single-pair" or "corrected"
    correction: corrector.CorrectionResult | None = None
    result: perturbation.PerturbationResult | None = None
    error: PolydistError | None = None
    warnings: list = field(default_factory=list)

    @property
    def succeeded(self) -> bool:
        return self.result is not None and self.result.verification.is_multiple


def analyze(
    P: MatrixPolynomial,
    mu,
    weights: WeightSet | None = None,
    mode: str = "auto",
    options: pencil.GammaSearchOptions | None = None,
    verify_tol: float = 1e-8,
) -> Analysis:
    """Run the whole construction for one ``(P, mu)``.

    Computational failures (no usable maximum, definite slope form, ...) are
    recorded on the returned object instead of raised, so a report can always
    be produced. Invalid inputs still raise.
    """
    mode = normalize_mode(mode)
    w = weights if weights is not None else WeightSet.ones(P.m)
    w.check_degree(P)
    out = Analysis(P, w, complex(mu), mode)
    out.hypotheses = perturbation.precheck_hypotheses(P, mu)
    out.warnings.extend(out.hypotheses.warnings)
    try:
        rec = pencil.maximize_gamma(P, mu, options)
        out.record = rec
        out.warnings.extend(rec.notes)
        out.pre_diagnostics = corrector.diagnose(rec.triplet_a, P, mu)
        if mode == "auto":
            tol = corrector.lemma_tolerance(P, mu)
            use_corrected = rec.coalesced or out.pre_diagnostics.violated(tol)
        else:
            use_corrected = mode == "corrected"
        if use_corrected:
            out.path = "corrected"
            out.correction = corrector.correct(rec, P, mu)
            U_mat, V_mat = out.correction.U_mat, out.correction.V_mat
        else:
            out.path = "single-pair"
            U_mat = corrector.halves_matrix(rec.triplet_a.u)
            V_mat = corrector.halves_matrix(rec.triplet_a.v)
        out.result = perturbation.perturb(
            P, w, mu, rec.s_star, rec.gamma_star, U_mat, V_mat, tol=verify_tol
        )
        if out.result.delta_rank < 2:
            out.warnings.append("V(gamma*) is rank deficient; pseudoinverse truncated")
    except PolydistError as exc:
        out.error = exc
    return out
