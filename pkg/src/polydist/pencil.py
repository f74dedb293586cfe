"""The block pencil ``F(gamma) = [[P(mu), 0], [gamma P'(mu), P(mu)]]`` and the
search for the maximum of its second smallest singular value over ``gamma``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import densela
from .errors import AlreadyMultiple, DegenerateGamma, InvalidInput
from .matpoly import MatrixPolynomial


@dataclass(frozen=True, eq=False)
class SingularTriplet:
    """A singular value of ``F(gamma)`` with unit vectors ``F v = s u``."""

    s: float
    u: np.ndarray
    v: np.ndarray
    gamma: float

    @property
    def n(self):
        return len(self.u) // 2

    @property
    def u1(self):
        return self.u[: self.n]

    @property
    def u2(self):
        return self.u[self.n :]

    @property
    def v1(self):
        return self.v[: self.n]

    @property
    def v2(self):
        return self.v[self.n :]


@dataclass(frozen=True)
class CurveSample:
    gamma: float
    s_hi: float  # s_{2n-2}
    s_lo: float  # s_{2n-1}


@dataclass(frozen=True)
class GammaSearchOptions:
    gamma_max: float = 10.0
    grid: int = 200
    gamma_tol: float = 1e-10
    coalescence_rtol: float = 1e-6
    max_doublings: int = 10

    def __post_init__(self):
        if not self.gamma_max > 0:
            raise InvalidInput("gamma_max must be positive")
        if self.grid < 3:
            raise InvalidInput("grid must have at least 3 points")
        if not self.gamma_tol > 0 or not self.coalescence_rtol > 0:
            raise InvalidInput("tolerances must be positive")
        if self.max_doublings < 0:
            raise InvalidInput("max_doublings must be >= 0")


@dataclass(frozen=True, eq=False)
class GammaStarRecord:
    gamma_star: float
    s_star: float
    triplet_a: SingularTriplet  # index 2n-1, the decreasing branch when coalesced
    triplet_b: SingularTriplet  # index 2n-2
    coalesced: bool
    gap: float
    gap_next: float  # |s_{2n-2} - s_{2n-3}| at gamma*
    slope_a: float
    slope_b: float
    slope_imag: float
    gamma_max_used: float
    coalescence_rtol: float
    notes: tuple = field(default=())


def _check_gamma(gamma):
    if not gamma >= 0:
        raise InvalidInput(f"gamma must be >= 0, got {gamma}")


def _blocks(P, mu):
    return P.evaluate(mu), P.derivative().evaluate(mu)


def _assemble(p, dp, gamma):
    n = p.shape[0]
    F = np.zeros((2 * n, 2 * n), dtype=complex)
    F[:n, :n] = p
    F[n:, n:] = p
    F[n:, :n] = gamma * dp
    return F


def build_F(P: MatrixPolynomial, mu, gamma: float) -> np.ndarray:
    _check_gamma(gamma)
    return _assemble(*_blocks(P, mu), gamma)


def _require_n(P):
    if P.n < 2:
        raise InvalidInput("the pencil search needs n >= 2 (s_{2n-2} must exist)")


def _triplet(res, k, gamma):
    s, u, v = res.pair(k)
    return SingularTriplet(float(s), u, v, float(gamma))


def sigma_pair(P: MatrixPolynomial, mu, gamma: float):
    """Triplets for ``s_{2n-1}`` and ``s_{2n-2}`` of ``F(gamma)`` (1-based indices)."""
    _check_gamma(gamma)
    _require_n(P)
    res = densela.svd(build_F(P, mu, gamma))
    k = 2 * P.n - 2  # 0-based position of s_{2n-1}
    return _triplet(res, k, gamma), _triplet(res, k - 1, gamma)


def raw_slope(t: SingularTriplet, dp: np.ndarray) -> complex:
    return complex(t.u2.conj() @ dp @ t.v1)


def singular_slope(t: SingularTriplet, P: MatrixPolynomial, mu) -> float:
    """``d s / d gamma`` of the branch through ``t``: ``Re(u_2* P'(mu) v_1)``."""
    return raw_slope(t, P.derivative().evaluate(mu)).real


def _lower_pair_values(p, dp, gammas):
    n = p.shape[0]
    stack = np.zeros((len(gammas), 2 * n, 2 * n), dtype=complex)
    stack[:, :n, :n] = p
    stack[:, n:, n:] = p
    stack[:, n:, :n] = np.asarray(gammas)[:, None, None] * dp
    s = np.linalg.svd(stack, compute_uv=False)
    return s[:, 2 * n - 2], s[:, 2 * n - 3]


def sample_curve(P: MatrixPolynomial, mu, gamma_lo: float, gamma_hi: float, count: int):
    """Uniform samples of ``(s_{2n-1}, s_{2n-2})`` on ``[gamma_lo, gamma_hi]``."""
    if not (0 <= gamma_lo < gamma_hi):
        raise InvalidInput("need 0 <= gamma_lo < gamma_hi")
    if count < 2:
        raise InvalidInput("count must be >= 2")
    _require_n(P)
    p, dp = _blocks(P, mu)
    gammas = np.linspace(gamma_lo, gamma_hi, count)
    lo, hi = _lower_pair_values(p, dp, gammas)
    return [CurveSample(float(g), float(b), float(a)) for g, a, b in zip(gammas, lo, hi)]


def golden_section_max(f, a, b, tol):
    """Maximize a unimodal ``f`` on ``[a, b]``; returns ``(x, f(x))``."""
    invphi = (math.sqrt(5) - 1) / 2
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    best = max((fc, c), (fd, d), (f(a), a), (f(b), b))
    return best[1], best[0]


def _resolve_branches(ta, tb, dp):
    """Split a (nearly) coalesced pair into its analytic branches.

    Near a crossing the individual singular vectors are ill-conditioned, but
    the two-dimensional subspace is not. The branches through the crossing
    diagonalize the slope form ``M_ij = u2_i* P'(mu) v1_j``; order them so
    the decreasing branch comes first.
    """
    U = np.column_stack([ta.u, tb.u])
    V = np.column_stack([ta.v, tb.v])
    n = len(ta.u) // 2
    M = U[n:].conj().T @ dp @ V[:n]
    H = (M + M.conj().T) / 2
    lam, G = np.linalg.eigh(H)
    if lam[1] - lam[0] <= 1e-14 * max(1.0, abs(lam).max()):
        return ta, tb
    Ur, Vr = U @ G, V @ G
    out = []
    for k, s in ((0, ta.s), (1, tb.s)):
        u, v = densela.normalize_pair(Ur[:, k], Vr[:, k])
        out.append(SingularTriplet(s, u, v, ta.gamma))
    return out[0], out[1]


def _refine_crossing(p, dp, n, gamma, res, max_steps=4):
    """Newton steps on the intersection of the two resolved branches.

    Golden-section search leaves a residual gap of order slope * tolerance;
    the branches are straight to first order, so one or two secant-free
    Newton steps close it to rounding level.
    """
    k = 2 * n - 2
    ta, tb = _resolve_branches(_triplet(res, k, gamma), _triplet(res, k - 1, gamma), dp)
    gap = res.s[k - 1] - res.s[k]
    for _ in range(max_steps):
        F = _assemble(p, dp, gamma)
        sa = (ta.u.conj() @ F @ ta.v).real
        sb = (tb.u.conj() @ F @ tb.v).real
        ka, kb = raw_slope(ta, dp).real, raw_slope(tb, dp).real
        if kb - ka <= 0:
            break
        g1 = gamma + (sb - sa) / (ka - kb)
        if not g1 > 0:
            break
        r1 = densela.svd(_assemble(p, dp, g1))
        gap1 = r1.s[k - 1] - r1.s[k]
        if not gap1 < gap:
            break
        gamma, res, gap = g1, r1, gap1
        ta, tb = _resolve_branches(_triplet(res, k, gamma), _triplet(res, k - 1, gamma), dp)
    return gamma, res, ta, tb


def maximize_gamma(P: MatrixPolynomial, mu, options: GammaSearchOptions | None = None):
    """Locate ``gamma* = argmax_{gamma >= 0} s_{2n-1}(F(gamma))``.

    A coarse grid on ``[0, gamma_max]`` picks the best sample (``gamma_max``
    doubles while the best sample sits on the right edge), golden-section
    search refines the surrounding bracket, and when the maximum turns out to
    be smooth rather than a crossing the zero of the slope is polished with
    Brent's method.
    """
    opts = options or GammaSearchOptions()
    _require_n(P)
    mu = complex(mu)
    p, dp = _blocks(P, mu)
    n = P.n
    notes = []

    gmax = opts.gamma_max
    for _ in range(opts.max_doublings + 1):
        grid = np.linspace(0.0, gmax, opts.grid)
        lo, _hi = _lower_pair_values(p, dp, grid)
        k = int(np.argmax(lo))
        if k < len(grid) - 1:
            break
        gmax *= 2
    else:
        notes.append("maximum at the right edge of the largest grid; result is a lower bound")
        gmax /= 2

    left = grid[max(k - 1, 0)]
    right = grid[min(k + 1, len(grid) - 1)]

    def s_lo(g):
        return float(_lower_pair_values(p, dp, [g])[0][0])

    tol = opts.gamma_tol * max(1.0, right)
    gamma, _ = golden_section_max(s_lo, left, right, tol)

    res = densela.svd(_assemble(p, dp, gamma))
    s = res.s
    s_star = float(s[2 * n - 2])
    fnorm = float(s[0])
    if s_star <= 1e-12 * fnorm:
        raise AlreadyMultiple(
            f"s* = {s_star:.3e} vanishes relative to ||F|| = {fnorm:.3e}: "
            "mu is numerically an eigenvalue of geometric multiplicity >= 2"
        )
    gap = float(s[2 * n - 3] - s[2 * n - 2])
    coalesced = gap <= opts.coalescence_rtol * s_star

    if coalesced:
        gamma, res, ta, tb = _refine_crossing(p, dp, n, gamma, res)
    else:
        gamma, res = _polish_smooth(p, dp, n, gamma, left, right, res)
        ta = _triplet(res, 2 * n - 2, gamma)
        tb = _triplet(res, 2 * n - 3, gamma)
    s = res.s
    s_star = float(s[2 * n - 2])
    gap = float(s[2 * n - 3] - s[2 * n - 2])

    if gamma <= tol:
        raise DegenerateGamma(
            f"s_(2n-1) is maximal at gamma = {gamma:.3e}; the construction needs gamma* > 0"
        )

    gap_next = float(s[2 * n - 4] - s[2 * n - 3])
    sa, sb = raw_slope(ta, dp), raw_slope(tb, dp)
    return GammaStarRecord(
        gamma_star=float(gamma),
        s_star=s_star,
        triplet_a=ta,
        triplet_b=tb,
        coalesced=bool(coalesced),
        gap=gap,
        gap_next=gap_next,
        slope_a=sa.real,
        slope_b=sb.real,
        slope_imag=max(abs(sa.imag), abs(sb.imag)),
        gamma_max_used=float(gmax),
        coalescence_rtol=opts.coalescence_rtol,
        notes=tuple(notes),
    )


def _polish_smooth(p, dp, n, gamma, left, right, res):
    k = 2 * n - 2

    def slope(g):
        r = densela.svd(_assemble(p, dp, g))
        s, u, v = r.pair(k)
        return complex(u[n:].conj() @ dp @ v[:n]).real

    a, b = max(left, 0.0), right
    try:
        fa, fb = slope(a), slope(b)
    except np.linalg.LinAlgError:
        return gamma, res
    if not (fa > 0 > fb):
        return gamma, res
    g = brentq(slope, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    r = densela.svd(_assemble(p, dp, g))
    # the value is flat at a smooth maximum; only reject a real loss
    if r.s[k] < res.s[k] - 1e-12 * r.s[0]:
        return gamma, res
    return g, r
