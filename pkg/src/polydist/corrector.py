"""Repairs the singular pair at a coalesced maximum.

When ``s_{2n-1}`` and ``s_{2n-2}`` meet at ``gamma*`` (the generic situation
for normal polynomials), neither branch alone has a vanishing slope
``u_2* P'(mu) v_1``. A unit combination ``alpha * branch_a + beta * branch_b``
is still a singular pair for ``s*``, and its slope is the Hermitian form
``[alpha, beta]^* M [alpha, beta]`` over the 2x2 slope matrix ``M``. Picking a
null vector of that form restores both conditions the perturbation needs.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import densela
from .errors import (
    BranchPairingInconsistent,
    CorrectionFailed,
    DefiniteForm,
    HigherCoalescence,
    NotCoalesced,
)
from .matpoly import MatrixPolynomial
from .pencil import GammaStarRecord, SingularTriplet, build_F

HERMITIAN_RTOL = 1e-6
DEFINITE_RTOL = 1e-10
POST_SLOPE_RTOL = 1e-8


@dataclass(frozen=True)
class LemmaDiagnostics:
    slope: float
    imag_residue: float
    uv_gram_gap: float

    def violated(self, tol: float) -> bool:
        return abs(self.slope) > tol or self.imag_residue > tol or self.uv_gram_gap > tol


@dataclass(frozen=True)
class NullFormSolution:
    alpha: complex
    beta: complex
    xi: float
    eta: float
    lam1: float
    lam2: float
    eigvecs: np.ndarray


@dataclass(frozen=True, eq=False)
class CorrectionResult:
    M: np.ndarray
    hermitian_residual: float
    lam1: float
    lam2: float
    xi: float
    eta: float
    alpha: complex
    beta: complex
    u: np.ndarray
    v: np.ndarray
    U_mat: np.ndarray
    V_mat: np.ndarray
    pair_residual: float
    form_residual: float
    diagnostics: LemmaDiagnostics


def halves_matrix(x):
    n = len(x) // 2
    return np.column_stack([x[:n], x[n:]])


def _dprime(P, mu):
    return P.derivative().evaluate(mu)


def lemma_tolerance(P: MatrixPolynomial, mu) -> float:
    return 1e-6 * max(1.0, densela.spectral_norm(_dprime(P, mu)))


def diagnose_vectors(u, v, dp) -> LemmaDiagnostics:
    n = len(u) // 2
    slope = complex(u[n:].conj() @ dp @ v[:n])
    U, V = halves_matrix(u), halves_matrix(v)
    gap = densela.spectral_norm(U.conj().T @ U - V.conj().T @ V)
    return LemmaDiagnostics(slope.real, abs(slope.imag), gap)


def diagnose(t: SingularTriplet, P: MatrixPolynomial, mu) -> LemmaDiagnostics:
    """Slope and ``||U*U - V*V||_2`` for the single-pair construction."""
    return diagnose_vectors(t.u, t.v, _dprime(P, mu))


def build_M(pair, P: MatrixPolynomial, mu):
    """Slope matrix over the two branches, Hermitized.

    Returns ``(M, residual)`` where ``residual = ||M_raw - M_raw*||_2``.
    """
    ta, tb = pair
    dp = _dprime(P, mu)
    U2 = np.column_stack([ta.u2, tb.u2])
    V1 = np.column_stack([ta.v1, tb.v1])
    raw = U2.conj().T @ dp @ V1
    M = (raw + raw.conj().T) / 2
    residual = densela.spectral_norm(raw - raw.conj().T)
    scale = densela.spectral_norm(raw)
    if residual > HERMITIAN_RTOL * scale:
        raise BranchPairingInconsistent(
            f"branch pairing inconsistent: slope matrix is not Hermitian "
            f"(||M - M*|| = {residual:.3e}, ||M|| = {scale:.3e})"
        )
    return M, residual


def solve_null_form(M, basis=None) -> NullFormSolution:
    """Unit ``[alpha, beta]`` with ``[alpha, beta]^* M [alpha, beta] = 0``.

    With ``M = W diag(lam1, lam2) W*`` and ``[alpha, beta] = W [xi, eta]``,
    the form becomes ``xi^2 lam1 + eta^2 lam2``, which vanishes for
    ``xi^2 = |lam2| / (|lam1| + |lam2|)`` and ``eta^2 = |lam1| / (|lam1| + |lam2|)``.

    ``basis`` optionally holds the two right vectors (as columns) that the
    coordinates of ``M`` refer to; the eigenvector phases are then fixed on
    the combined vectors rather than on the coordinates, which makes the
    resulting combination independent of how the branch basis was chosen.
    """
    M = np.asarray(M, dtype=complex)
    lam1, lam2, W = densela.herm_eig_2x2(M)
    if basis is not None:
        basis = np.asarray(basis)
        for k in range(2):
            W[:, k] *= densela.phase_of(basis @ W[:, k]).conjugate()
    scale = max(abs(lam1), abs(lam2))
    if scale == 0:
        warnings.warn("slope matrix is zero; any unit combination is a null vector", stacklevel=2)
        return NullFormSolution(complex(W[0, 0]), complex(W[1, 0]), 1.0, 0.0, lam1, lam2, W)
    if lam1 * lam2 > DEFINITE_RTOL * scale**2:
        raise DefiniteForm(
            f"slope form is definite (eigenvalues {lam1:.6g}, {lam2:.6g}); "
            "coalescence correction inapplicable"
        )
    a1, a2 = abs(lam1), abs(lam2)
    xi = math.sqrt(a2 / (a1 + a2))
    eta = math.sqrt(a1 / (a1 + a2))
    ab = W @ np.array([xi, eta])
    return NullFormSolution(complex(ab[0]), complex(ab[1]), xi, eta, lam1, lam2, W)


def combine(sol: NullFormSolution, pair, P: MatrixPolynomial, mu, M=None, hermitian_residual=0.0):
    """Form ``u = alpha u_a + beta u_b``, ``v = alpha v_a + beta v_b`` and re-check."""
    ta, tb = pair
    dp = _dprime(P, mu)
    u = sol.alpha * ta.u + sol.beta * tb.u
    v = sol.alpha * ta.v + sol.beta * tb.v
    diag = diagnose_vectors(u, v, dp)
    post = complex(u[ta.n :].conj() @ dp @ v[: ta.n])
    if abs(post) > POST_SLOPE_RTOL * max(densela.spectral_norm(dp), np.finfo(float).tiny):
        raise CorrectionFailed(f"correction failed: combined slope {post:.3e} does not vanish")

    F = build_F(P, mu, ta.gamma)
    s = ta.s
    pair_residual = max(
        np.linalg.norm(F @ v - s * u), np.linalg.norm(F.conj().T @ u - s * v)
    )
    if M is None:
        M, hermitian_residual = build_M(pair, P, mu)
    x = np.array([sol.alpha, sol.beta])
    form_residual = abs(complex(x.conj() @ M @ x))
    return CorrectionResult(
        M=M,
        hermitian_residual=float(hermitian_residual),
        lam1=sol.lam1,
        lam2=sol.lam2,
        xi=sol.xi,
        eta=sol.eta,
        alpha=sol.alpha,
        beta=sol.beta,
        u=u,
        v=v,
        U_mat=halves_matrix(u),
        V_mat=halves_matrix(v),
        pair_residual=float(pair_residual),
        form_residual=float(form_residual),
        diagnostics=diag,
    )


def correct(record: GammaStarRecord, P: MatrixPolynomial, mu) -> CorrectionResult:
    """Full correction for a coalesced optimum."""
    tol = record.coalescence_rtol * record.s_star
    if not record.coalesced:
        raise NotCoalesced(
            f"s_(2n-1) and s_(2n-2) do not coalesce at gamma* (gap {record.gap:.3e})"
        )
    if record.gap_next <= tol:
        raise HigherCoalescence(
            "three or more singular values coalesce at gamma*; only double coalescence is handled"
        )
    pair = (record.triplet_a, record.triplet_b)
    M, residual = build_M(pair, P, mu)
    basis = np.column_stack([record.triplet_a.v, record.triplet_b.v])
    sol = solve_null_form(M, basis=basis)
    return combine(sol, pair, P, mu, M=M, hermitian_residual=residual)
