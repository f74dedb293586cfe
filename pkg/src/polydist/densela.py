"""Dense complex linear algebra with the accuracy contracts the pipeline relies on.

LAPACK (through numpy) does the factorizations; this module adds input checks,
ordering and a reproducible phase convention. A singular pair ``(u, v)`` is
rotated by one common unimodular factor chosen so that the largest-modulus
entry of ``v`` is real and positive (first index wins ties). Eigenvectors are
normalized the same way on their own entries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, NonFiniteInput, NonHermitian

_TIE_RTOL = 1e-12


def _as_matrix(a):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.size == 0:
        raise InvalidInput(f"expected a nonempty 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFiniteInput("matrix has non-finite entries")
    return a


def phase_of(x) -> complex:
    """Unimodular ``c`` such that ``conj(c) * x`` has its leading entry real positive.

    The leading entry is the first one whose modulus is within a relative
    ``1e-12`` of the maximum modulus. Returns 1 for the zero vector.
    """
    x = np.asarray(x)
    mag = np.abs(x)
    top = mag.max() if mag.size else 0.0
    if top == 0:
        return 1.0 + 0j
    k = int(np.argmax(mag >= top * (1 - _TIE_RTOL)))
    return complex(x[k] / mag[k])


def normalize_pair(u, v):
    """Apply the common-phase convention to a singular pair."""
    c = phase_of(v)
    return u * c.conjugate(), v * c.conjugate()


@dataclass(frozen=True, eq=False)
class SvdResult:
    """Full SVD ``A = U diag(s) V*``; columns ``U[:, i]``, ``V[:, i]`` pair with ``s[i]``."""

    s: np.ndarray
    U: np.ndarray
    V: np.ndarray

    def pair(self, i):
        return self.s[i], self.U[:, i], self.V[:, i]


def svd(a) -> SvdResult:
    a = _as_matrix(a)
    u, s, vh = np.linalg.svd(a, full_matrices=True)
    v = vh.conj().T
    k = len(s)
    for i in range(k):
        c = phase_of(v[:, i]).conjugate()
        u[:, i] *= c
        v[:, i] *= c
    return SvdResult(s, u, v)


def singular_values(a) -> np.ndarray:
    return np.linalg.svd(_as_matrix(a), compute_uv=False)


def spectral_norm(a) -> float:
    a = np.asarray(a, dtype=complex)
    if a.size == 0:
        return 0.0
    return float(singular_values(a)[0])


def herm_eig_2x2(M, rtol: float = 1e-8):
    """Eigendecomposition ``M = U diag(lam1, lam2) U*`` of a 2x2 Hermitian matrix.

    Returns ``(lam1, lam2, U)`` with ``lam1 >= lam2``. Raises
    :class:`NonHermitian` when ``||M - M*||_2 > rtol * ||M||_2``.
    """
    M = _as_matrix(M)
    if M.shape != (2, 2):
        raise InvalidInput(f"expected a 2x2 matrix, got {M.shape}")
    scale = spectral_norm(M)
    skew = spectral_norm(M - M.conj().T)
    if skew > rtol * scale:
        raise NonHermitian(f"matrix is not Hermitian: ||M - M*|| = {skew:.3e}")
    H = (M + M.conj().T) / 2
    lam, U = np.linalg.eigh(H)
    lam, U = lam[::-1].copy(), U[:, ::-1].copy()
    for k in range(2):
        U[:, k] *= phase_of(U[:, k]).conjugate()
    return float(lam[0]), float(lam[1]), U


def pinv_thin(V, rtol: float = 1e-12):
    """Moore-Penrose pseudoinverse of a tall ``n x 2`` matrix.

    Singular values below ``rtol * s_1`` are treated as zero. Returns the
    ``2 x n`` pseudoinverse together with the numerical rank, so callers can
    flag rank deficiency.
    """
    V = _as_matrix(V)
    if V.shape[1] != 2 or V.shape[0] < 2:
        raise InvalidInput(f"expected an n x 2 matrix with n >= 2, got {V.shape}")
    u, s, vh = np.linalg.svd(V, full_matrices=False)
    keep = s > rtol * s[0] if s[0] > 0 else np.zeros_like(s, dtype=bool)
    inv = np.where(keep, 1.0 / np.where(keep, s, 1.0), 0.0)
    X = (vh.conj().T * inv) @ u.conj().T
    return X, int(keep.sum())


def adjugate(a) -> np.ndarray:
    """Classical adjugate via the SVD, valid for singular matrices.

    With ``A = U S V*``, ``adj(A) = det(U) det(V*) V diag(prod_{j != i} s_j) U*``.
    """
    a = _as_matrix(a)
    n = a.shape[0]
    if a.shape != (n, n):
        raise InvalidInput("adjugate needs a square matrix")
    if n == 1:
        return np.ones((1, 1), dtype=complex)
    u, s, vh = np.linalg.svd(a)
    # products of all singular values but one, without dividing
    left = np.concatenate(([1.0], np.cumprod(s[:-1])))
    right = np.concatenate((np.cumprod(s[::-1][:-1])[::-1], [1.0]))
    cof = left * right
    unit = np.linalg.det(u) * np.linalg.det(vh)
    return unit * (vh.conj().T * cof) @ u.conj().T


def det_and_slope(Q, mu):
    """``det Q(mu)`` and ``d/dz det Q(z)`` at ``mu`` via Jacobi's formula."""
    mu = complex(mu)
    A = Q.evaluate(mu)
    if Q.m >= 1:
        dA = Q.derivative().evaluate(mu)
    else:
        dA = np.zeros_like(A)
    det = complex(np.linalg.det(A))
    slope = complex(np.trace(adjugate(A) @ dA))
    return det, slope
