"""Matrix polynomials, scalar weight polynomials and weak-normality checks."""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidInput, NonFiniteInput, SingularLeadingCoefficient

LEADING_RTOL = 1e-12


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class MatrixPolynomial:
    """``P(z) = A_0 + A_1 z + ... + A_m z^m`` with square complex coefficients.

    Coefficients are stored lowest degree first. The leading coefficient must
    be numerically nonsingular, i.e. ``s_min(A_m) > 1e-12 * ||A_m||_2``.
    """

    coeffs: tuple

    def __init__(self, coeffs: Sequence):
        if len(coeffs) == 0:
            raise InvalidInput("matrix polynomial needs at least one coefficient")
        mats = []
        for j, a in enumerate(coeffs):
            a = np.asarray(a)
            if a.ndim != 2 or a.shape[0] != a.shape[1]:
                raise InvalidInput(f"coefficient A_{j} is not square: shape {a.shape}")
            if mats and a.shape != mats[0].shape:
                raise InvalidInput(
                    f"coefficient A_{j} has shape {a.shape}, expected {mats[0].shape}"
                )
            if not np.all(np.isfinite(a)):
                raise NonFiniteInput(f"coefficient A_{j} has non-finite entries")
            mats.append(_frozen(a))
        if mats[0].shape[0] == 0:
            raise InvalidInput("matrix dimension must be positive")
        s = np.linalg.svd(mats[-1], compute_uv=False)
        if not s[-1] > LEADING_RTOL * s[0]:
            cond = np.inf if s[-1] == 0 else s[0] / s[-1]
            raise SingularLeadingCoefficient(
                f"leading coefficient A_{len(mats) - 1} is numerically singular "
                f"(s_min={s[-1]:.3e}, s_max={s[0]:.3e}, cond={cond:.3e})"
            )
        object.__setattr__(self, "coeffs", tuple(mats))

    @property
    def n(self) -> int:
        return self.coeffs[0].shape[0]

    @property
    def m(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        return self.evaluate(z)

    def evaluate(self, z) -> np.ndarray:
        """Value at the scalar ``z`` by Horner's rule."""
        z = complex(z)
        out = self.coeffs[-1].copy()
        for a in reversed(self.coeffs[:-1]):
            out = out * z + a
        return out

    def derivative(self) -> "MatrixPolynomial":
        if self.m < 1:
            raise InvalidInput("cannot differentiate a degree-0 matrix polynomial")
        return MatrixPolynomial([j * a for j, a in enumerate(self.coeffs) if j > 0])

    def __repr__(self):
        return f"MatrixPolynomial(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class WeightSet:
    """Nonnegative weights ``w_0..w_m`` (``w_0 > 0``) and their scalar polynomial."""

    weights: tuple = field()

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        if len(w) == 0:
            raise InvalidInput("weights must be nonempty")
        if not all(np.isfinite(w)):
            raise NonFiniteInput("weights must be finite")
        if any(x < 0 for x in w):
            raise InvalidInput("weights must be nonnegative")
        if not w[0] > 0:
            raise InvalidInput("weight w_0 must be positive")
        object.__setattr__(self, "weights", w)

    @classmethod
    def ones(cls, m: int) -> "WeightSet":
        return cls((1.0,) * (m + 1))

    @property
    def m(self) -> int:
        return len(self.weights) - 1

    def value(self, t: float) -> float:
        if t < 0:
            raise InvalidInput(f"weight polynomial argument must be >= 0, got {t}")
        return float(np.polynomial.polynomial.polyval(t, self.weights))

    def slope(self, t: float) -> float:
        if t < 0:
            raise InvalidInput(f"weight polynomial argument must be >= 0, got {t}")
        if self.m == 0:
            return 0.0
        dw = np.polynomial.polynomial.polyder(self.weights)
        return float(np.polynomial.polynomial.polyval(t, dw))

    def check_degree(self, P: MatrixPolynomial):
        if self.m != P.m:
            raise InvalidInput(
                f"expected {P.m + 1} weights for a degree-{P.m} polynomial, got {self.m + 1}"
            )


def unit_direction(mu) -> complex:
    """``conj(mu)/|mu|``, taken as 0 at ``mu = 0``."""
    mu = complex(mu)
    if mu == 0:
        return 0j
    return mu.conjugate() / abs(mu)


def phi(w: WeightSet, mu) -> complex:
    """Weighted log-derivative factor ``w'(|mu|)/w(|mu|) * conj(mu)/|mu|``."""
    t = abs(complex(mu))
    return w.slope(t) / w.value(t) * unit_direction(mu)


@dataclass(frozen=True)
class NormalityReport:
    weakly_normal: bool
    worst_residual: float
    witness: complex | None  # None when a coefficient is the worst case
    witness_coefficient: int | None


def _normality_residual(a):
    norm = np.linalg.norm(a, 2)
    if norm == 0:
        return 0.0
    c = a @ a.conj().T - a.conj().T @ a
    return np.linalg.norm(c, 2) / norm**2


def is_weakly_normal(P: MatrixPolynomial, tol: float = 1e-10) -> NormalityReport:
    """Finite test for weak normality.

    Every coefficient and ``P(z_k)`` at the ``m+1`` roots of unity must pass
    the relative commutator test ``||AA* - A*A||_2 <= tol ||A||_2^2``. This
    is a necessary condition; it does not certify every ``z``.
    """
    if not tol > 0:
        raise InvalidInput("tol must be positive")
    worst, witness, witness_coef = -1.0, None, None
    for j, a in enumerate(P.coeffs):
        r = _normality_residual(a)
        if r > worst:
            worst, witness, witness_coef = r, None, j
    for k in range(P.m + 1):
        z = cmath.exp(2j * cmath.pi * k / (P.m + 1))
        r = _normality_residual(P.evaluate(z))
        if r > worst:
            worst, witness, witness_coef = r, z, None
    return NormalityReport(worst <= tol, float(worst), witness, witness_coef)
