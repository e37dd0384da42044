"""Noisy Oja iteration for the top-k eigenvectors of a Katz matrix, noisy
eigenvalue release and low-rank reassembly."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .privacy import PrivacyLedger, PrivacyParams

logger = logging.getLogger(__name__)

DEFAULT_RANK = 64
DEPENDENCE_TOL = 1e-14


class LinearDependenceError(ValueError):
    """A column became (numerically) dependent on the preceding ones."""

    def __init__(self, column: int):
        super().__init__(f"column {column} is linearly dependent on earlier columns")
        self.column = column


@dataclass(frozen=True)
class OjaConfig:
    k: int
    gamma: int
    eta: float
    sigma: float = 0.0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.gamma < 1:
            raise ValueError("gamma must be at least 1")
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")


@dataclass(frozen=True)
class EigenEstimate:
    vectors: np.ndarray
    values: np.ndarray


def gram_schmidt(m: np.ndarray, tol: float = DEPENDENCE_TOL) -> np.ndarray:
    """Orthonormalize columns with modified Gram-Schmidt.

    Each column is projected twice against the accepted ones, which keeps
    the result orthonormal to machine precision even for ill-conditioned
    input. A column whose residual norm drops below ``tol`` times its
    original norm raises :class:`LinearDependenceError`.
    """
    q = np.array(m, dtype=np.float64, copy=True)
    if q.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    n, k = q.shape
    if k > n:
        raise LinearDependenceError(n)
    for j in range(k):
        v = q[:, j]
        norm0 = np.linalg.norm(v)
        for _ in range(2):
            for i in range(j):
                v -= (q[:, i] @ v) * q[:, i]
        norm = np.linalg.norm(v)
        if norm0 == 0 or norm < tol * norm0:
            raise LinearDependenceError(j)
        q[:, j] = v / norm
    return q


def orthonormalize(m: np.ndarray, rng: np.random.Generator, max_retries: int = 100) -> np.ndarray:
    """Gram-Schmidt that redraws dependent columns instead of failing."""
    m = np.array(m, dtype=np.float64, copy=True)
    for _ in range(max_retries):
        try:
            return gram_schmidt(m)
        except LinearDependenceError as exc:
            logger.warning("column %d collapsed during orthonormalization; redrawing it", exc.column)
            m[:, exc.column] = rng.standard_normal(m.shape[0])
    raise RuntimeError("could not obtain a full-rank iterate")


def random_orthonormal(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    return orthonormalize(rng.standard_normal((n, k)), rng)


def _check_charges(charges, count: int, what: str):
    if charges is not None and len(charges) != count:
        raise ValueError(f"{what} needs {count} budget charges, got {len(charges)}")


def private_top_k(
    h: np.ndarray,
    cfg: OjaConfig,
    v0: np.ndarray,
    rng: np.random.Generator,
    ledger: PrivacyLedger | None = None,
    charges: Sequence[PrivacyParams] | None = None,
) -> np.ndarray:
    """Run ``cfg.gamma`` noisy Oja steps ``V <- QR(V + eta (H V + G))``.

    ``G`` is fresh n-by-k Gaussian noise at scale ``cfg.sigma`` each step.
    When a ledger is supplied, ``charges[t]`` is recorded for step ``t``.
    """
    n = h.shape[0]
    if v0.shape != (n, cfg.k):
        raise ValueError(f"v0 must have shape {(n, cfg.k)}, got {v0.shape}")
    if ledger is not None:
        if charges is None:
            raise ValueError("a ledger needs per-step charges")
        _check_charges(charges, cfg.gamma, "private_top_k")
    v = orthonormalize(v0, rng)
    for t in range(cfg.gamma):
        g = h @ v
        if cfg.sigma > 0:
            g = g + rng.normal(0.0, cfg.sigma, size=g.shape)
        v = orthonormalize(v + cfg.eta * g, rng)
        if ledger is not None:
            ledger.charge(charges[t], f"oja_step_{t + 1}")
    return v


def private_eigenvalues(
    h: np.ndarray,
    vectors: np.ndarray,
    sigma: float,
    rng: np.random.Generator,
    ledger: PrivacyLedger | None = None,
    charges: Sequence[PrivacyParams] | None = None,
) -> np.ndarray:
    """Noisy eigenvalue magnitudes ``sqrt(max(0, ||H v||^2 + N(0, sigma^2)))``."""
    k = vectors.shape[1]
    if ledger is not None:
        if charges is None:
            raise ValueError("a ledger needs per-eigenvalue charges")
        _check_charges(charges, k, "private_eigenvalues")
    sq = np.sum((h @ vectors) ** 2, axis=0)
    values = np.empty(k)
    for j in range(k):
        noisy = sq[j]
        if sigma > 0:
            noisy += rng.normal(0.0, sigma)
        values[j] = math.sqrt(max(noisy, 0.0))
        if ledger is not None:
            ledger.charge(charges[j], f"eigenvalue_{j + 1}")
    return values


def assemble_noisy_katz(e: EigenEstimate) -> np.ndarray:
    """``V diag(values) V^T``, made exactly symmetric."""
    m = (e.vectors * e.values) @ e.vectors.T
    return 0.5 * (m + m.T)


def default_schedule(h: np.ndarray, beta: float, sigma: float, n: int) -> tuple[int, float]:
    """Iteration count ``min(1/beta, ||H||_F^2 / (sigma sqrt n))`` and step size
    ``1 / (gamma sigma sqrt n)``; gamma is floored and at least 1."""
    if not sigma > 0:
        raise ValueError("default schedule needs sigma > 0; pass gamma and eta explicitly")
    scale = sigma * math.sqrt(n)
    fro2 = float(np.sum(np.square(h)))
    gamma = max(1, math.floor(min(1.0 / beta, fro2 / scale)))
    eta = 1.0 / (gamma * scale)
    return gamma, eta
