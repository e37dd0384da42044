"""Katz similarity matrices: exact closed form, truncated series, error bound
and the decay factor that caps the node-level sensitivity."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

DEFAULT_HOPS = 2


class KatzDivergenceError(ValueError):
    """The Katz series does not converge for the requested decay factor."""


@dataclass(frozen=True)
class KatzParams:
    """Decay factor ``beta`` and hop parameter ``h``; the series is cut at order 2h+1."""

    beta: float
    h: int = DEFAULT_HOPS

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if self.h < 0:
            raise ValueError("h must be nonnegative")

    @property
    def order(self) -> int:
        return 2 * self.h + 1


def _dense(a) -> np.ndarray:
    if sp.issparse(a):
        return a.toarray()
    return np.asarray(a, dtype=np.float64)


def spectral_radius(a, tol: float = 1e-10) -> float:
    """Largest absolute eigenvalue of a symmetric matrix.

    Small matrices use a dense eigensolver; large sparse ones use Lanczos.
    """
    n = a.shape[0]
    if n == 0:
        return 0.0
    if n <= 500 or not sp.issparse(a):
        return float(np.max(np.abs(np.linalg.eigvalsh(_dense(a)))))
    if a.nnz == 0:
        return 0.0
    vals = spla.eigsh(a, k=1, which="LM", tol=tol, return_eigenvectors=False)
    return float(abs(vals[0]))


def exact_katz(a, beta: float) -> np.ndarray:
    """Infinite Katz series ``(I - beta A)^-1 - I``."""
    n = a.shape[0]
    rho = spectral_radius(a)
    # the eigensolver is only accurate to a few ulps
    if beta * rho >= 1 - 1e-12:
        raise KatzDivergenceError(
            f"beta={beta:g} must be below 1/spectral_radius={1 / rho if rho else math.inf:g}"
        )
    ba = beta * _dense(a)
    try:
        # (I - bA)^-1 bA equals the series but avoids cancelling against I
        h = np.linalg.solve(np.eye(n) - ba, ba)
    except np.linalg.LinAlgError as exc:
        raise KatzDivergenceError(str(exc)) from exc
    return 0.5 * (h + h.T)


def approx_katz(a, params: KatzParams) -> np.ndarray:
    """Truncated Katz matrix ``sum_{l=1}^{2h+1} beta^l A^l``.

    Only the running power ``beta^l A^l`` is kept; each step is one sparse
    times dense product.
    """
    beta = params.beta
    a = sp.csr_array(a) if not sp.issparse(a) else a.tocsr()
    term = beta * a.toarray()
    total = term.copy()
    for _ in range(params.order - 1):
        term = beta * (a @ term)
        total += term
    return 0.5 * (total + total.T)


def katz_polynomial(lam, beta: float, h: int):
    """Map an adjacency eigenvalue to the matching truncated Katz eigenvalue."""
    lam = np.asarray(lam, dtype=np.float64)
    out = np.zeros_like(lam)
    power = np.ones_like(lam)
    for _ in range(2 * h + 1):
        power = power * beta * lam
        out = out + power
    return out


def katz_error_bound(beta: float, d: int, h: int) -> float:
    """Entrywise bound on |exact - truncated| when ``beta * d < 1``."""
    if beta * d >= 1:
        raise ValueError(f"bound needs beta*d < 1, got {beta * d:g}")
    if d == 0:
        return 0.0
    return beta ** (2 * h + 2) / (1 - beta * d) * d ** (2 * h + 1)


def regulated_beta(n: int, k: int) -> float:
    """Largest decay factor for which ``H V`` has unit Frobenius sensitivity.

    Returns ``1 / ((n-1) (n^1.5 k^0.5 + 1))``.
    """
    if n < 2:
        raise ValueError("regulated beta needs at least 2 nodes")
    if k < 1:
        raise ValueError("k must be positive")
    return 1.0 / ((n - 1) * (n ** 1.5 * math.sqrt(k) + 1))


def sensitivity_bound(beta: float, n: int, h: int) -> float:
    """Worst-case entrywise change of the truncated Katz matrix when one node's
    edges are rewired, bounding every walk-count term by ``(n-1)^l``."""
    x = beta * (n - 1)
    return float(sum(x ** l for l in range(1, 2 * h + 2)))
