"""Rank-two perturbation that makes ``mu`` a multiple eigenvalue, and its checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import densela
from .errors import InvalidInput, SingularLeadingCoefficient
from .matpoly import MatrixPolynomial, WeightSet, phi, unit_direction

PRECHECK_RTOL = 1e-10


def build_delta(s_star: float, U_mat, V_mat, gamma: float, phi_value: complex):
    """``-s* U [[1, -gamma phi], [0, 1]] V^+``.

    Returns ``(delta, rank)`` where ``rank`` is the numerical rank of ``V_mat``
    used by the pseudoinverse (2 unless ``V_mat`` is rank deficient).
    """
    if not gamma > 0:
        raise InvalidInput(f"gamma* must be positive, got {gamma}")
    U_mat = np.asarray(U_mat, dtype=complex)
    V_mat = np.asarray(V_mat, dtype=complex)
    if not np.any(V_mat):
        raise InvalidInput("V(gamma*) is zero")
    Vp, rank = densela.pinv_thin(V_mat)
    K = np.array([[1.0, -gamma * phi_value], [0.0, 1.0]], dtype=complex)
    return -s_star * U_mat @ K @ Vp, rank


def delta_coefficients(delta, w: WeightSet, mu):
    """Distribute ``delta`` over the coefficients: ``w_j / w(|mu|) * (conj(mu)/|mu|)^j``."""
    delta = np.asarray(delta, dtype=complex)
    wmu = w.value(abs(complex(mu)))
    z = unit_direction(mu)
    out = []
    for j, wj in enumerate(w.weights):
        # 0**0 == 1 keeps the mu = 0 convention
        out.append((wj / wmu) * z**j * delta)
    return out


def build_Q(P: MatrixPolynomial, delta_coeffs) -> MatrixPolynomial:
    if len(delta_coeffs) != P.m + 1:
        raise InvalidInput(f"expected {P.m + 1} perturbation coefficients, got {len(delta_coeffs)}")
    coeffs = []
    for j, (a, d) in enumerate(zip(P.coeffs, delta_coeffs)):
        d = np.asarray(d)
        if d.shape != a.shape:
            raise InvalidInput(f"perturbation coefficient {j} has shape {d.shape}")
        coeffs.append(a + d)
    try:
        return MatrixPolynomial(coeffs)
    except SingularLeadingCoefficient as exc:
        raise SingularLeadingCoefficient(f"perturbed polynomial: {exc}") from None


@dataclass(frozen=True)
class Verification:
    verdict: str  # "multiple (defective)", "multiple (semisimple-like)", "simple", "not-an-eigenvalue"
    smin_ratio: float
    det: complex
    det_slope: complex
    slope_scale: float
    slope_residual: float
    geometric_multiplicity: int
    tol: float

    @property
    def is_multiple(self) -> bool:
        return self.verdict.startswith("multiple")


def _slope_scale(Q, mu, reference):
    if reference is not None:
        return max(1.0, abs(densela.det_and_slope(reference, mu)[1]))
    # bound on |trace(adj(Q(mu)) Q'(mu))| when no unperturbed polynomial is given
    A = Q.evaluate(mu)
    dA = Q.derivative().evaluate(mu) if Q.m >= 1 else np.zeros_like(A)
    nA = densela.spectral_norm(A)
    return max(1.0, Q.n * nA ** (Q.n - 1) * densela.spectral_norm(dA))


def verify_multiple(Q: MatrixPolynomial, mu, tol: float = 1e-8, reference=None) -> Verification:
    """Check that ``mu`` is a multiple eigenvalue of ``Q``.

    Three measurements at ``mu``: the relative smallest singular value of
    ``Q(mu)`` (is it an eigenvalue?), the derivative of ``det Q`` scaled by
    that of the unperturbed polynomial ``reference`` (is it a repeated root?),
    and the number of singular values below ``tol * ||Q(mu)||``.
    """
    if not tol > 0:
        raise InvalidInput("tol must be positive")
    mu = complex(mu)
    s = densela.singular_values(Q.evaluate(mu))
    smin_ratio = float(s[-1] / s[0]) if s[0] > 0 else 0.0
    geo = int(np.sum(s <= tol * s[0]))
    det, slope = densela.det_and_slope(Q, mu)
    scale = _slope_scale(Q, mu, reference)
    slope_res = abs(slope) / scale
    if smin_ratio > tol:
        verdict = "not-an-eigenvalue"
    elif geo >= 2:
        verdict = "multiple (semisimple-like)"
    elif slope_res <= tol:
        verdict = "multiple (defective)"
    else:
        verdict = "simple"
    return Verification(verdict, smin_ratio, det, slope, scale, slope_res, geo, tol)


@dataclass(frozen=True)
class HypothesisReport:
    dp_smin_ratio: float
    dp_violated: bool  # mu is (numerically) an eigenvalue of P'
    p_smin: float
    p_smin_ratio: float
    mu_is_eigenvalue: bool

    @property
    def warnings(self):
        out = []
        if self.dp_violated:
            out.append("mu is numerically an eigenvalue of P'(z); the construction's hypothesis fails")
        if self.mu_is_eigenvalue:
            out.append("mu is already an eigenvalue of P(z)")
        return out


def precheck_hypotheses(P: MatrixPolynomial, mu) -> HypothesisReport:
    mu = complex(mu)
    dp = P.derivative().evaluate(mu) if P.m >= 1 else np.zeros((P.n, P.n))
    sd = densela.singular_values(dp)
    dp_ratio = float(sd[-1] / sd[0]) if sd[0] > 0 else 0.0
    sp = densela.singular_values(P.evaluate(mu))
    p_ratio = float(sp[-1] / sp[0]) if sp[0] > 0 else 0.0
    return HypothesisReport(
        dp_smin_ratio=dp_ratio,
        dp_violated=dp_ratio < PRECHECK_RTOL,
        p_smin=float(sp[-1]),
        p_smin_ratio=p_ratio,
        mu_is_eigenvalue=p_ratio < PRECHECK_RTOL,
    )


@dataclass(frozen=True, eq=False)
class PerturbationResult:
    delta: np.ndarray
    delta_rank: int
    delta_coeffs: list
    Q: MatrixPolynomial
    verification: Verification
    delta_norm: float
    coeff_norms: list
    s_star: float
    phi: complex


def perturb(P: MatrixPolynomial, w: WeightSet, mu, s_star, gamma, U_mat, V_mat, tol=1e-8):
    """Assemble ``Q = P + Delta(z)`` from a singular pair and verify it."""
    w.check_degree(P)
    ph = phi(w, mu)
    delta, rank = build_delta(s_star, U_mat, V_mat, gamma, ph)
    coeffs = delta_coefficients(delta, w, mu)
    Q = build_Q(P, coeffs)
    ver = verify_multiple(Q, mu, tol=tol, reference=P)
    return PerturbationResult(
        delta=delta,
        delta_rank=rank,
        delta_coeffs=coeffs,
        Q=Q,
        verification=ver,
        delta_norm=densela.spectral_norm(delta),
        coeff_norms=[densela.spectral_norm(d) for d in coeffs],
        s_star=float(s_star),
        phi=ph,
    )
