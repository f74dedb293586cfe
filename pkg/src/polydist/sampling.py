"""Random normal matrix polynomials for property tests.

``POLYDIST_SEED`` sets the default seed.
"""

from __future__ import annotations

import os

import numpy as np
from scipy.stats import unitary_group

from .matpoly import MatrixPolynomial


def default_rng(seed=None):
    if seed is None:
        seed = int(os.environ.get("POLYDIST_SEED", "0"))
    return np.random.default_rng(seed)


def _cnormal(rng, size):
    return rng.standard_normal(size) + 1j * rng.standard_normal(size)


def random_normal_polynomial(rng, n, m):
    """``W diag(d_i(z)) W*`` with a Haar unitary ``W`` and random scalar ``d_i``.

    Returns ``(P, W, D)`` where ``D[i]`` holds the coefficients of ``d_i``,
    lowest degree first. Leading coefficients are bounded away from zero.
    """
    W = unitary_group.rvs(n, random_state=rng) if n > 1 else np.ones((1, 1), dtype=complex)
    D = _cnormal(rng, (n, m + 1))
    lead = D[:, m]
    D[:, m] = lead / np.abs(lead) * (0.5 + rng.random(n))
    coeffs = [W @ np.diag(D[:, j]) @ W.conj().T for j in range(m + 1)]
    return MatrixPolynomial(coeffs), W, D


def random_mu(rng, D, margin=0.05, radius=2.0, tries=1000):
    """A point avoiding the roots of every ``d_i`` and ``d_i'`` by ``margin``."""
    roots = []
    for d in D:
        roots.extend(np.polynomial.polynomial.polyroots(d))
        if len(d) > 2:
            roots.extend(np.polynomial.polynomial.polyroots(np.polynomial.polynomial.polyder(d)))
    roots = np.asarray(roots)
    for _ in range(tries):
        mu = complex(*(radius * (2 * rng.random(2) - 1)))
        if roots.size == 0 or np.min(np.abs(roots - mu)) > margin:
            return mu
    raise RuntimeError("could not sample mu away from the eigenvalues")
