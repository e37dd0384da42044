"""Graph reconstruction from a (noisy) Katz matrix through a regularized,
double-centered pseudo-inverse."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph

DEFAULT_ALPHA = 5e-6
DEFAULT_CUTOFF = 1e-10
PENROSE_CHECK_TOL = 1e-6


class PinvStrategy(str, enum.Enum):
    CHOLESKY = "cholesky_factorization"
    SVD = "svd_cutoff"


class RecoveryError(ArithmeticError):
    pass


@dataclass(frozen=True)
class RecoveryConfig:
    alpha: float = DEFAULT_ALPHA
    pinv_strategy: PinvStrategy = PinvStrategy.CHOLESKY
    svd_cutoff: float = DEFAULT_CUTOFF
    # only used by the cholesky strategy: retry with svd if the result fails M M+ M = M
    fallback: bool = True

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")
        if not 0 < self.svd_cutoff < 1:
            raise ValueError("svd_cutoff must lie in (0, 1)")
        object.__setattr__(self, "pinv_strategy", PinvStrategy(self.pinv_strategy))


def full_rank_cholesky(a: np.ndarray, tol: float) -> np.ndarray | None:
    """Factor a PSD matrix as ``L L^T`` with ``L`` of full column rank.

    Pivots at or below ``tol`` are treated as rank deficiency and skipped.
    Returns None if a pivot is clearly negative (matrix not PSD).
    """
    n = a.shape[0]
    lower = np.zeros((n, n))
    r = 0
    for k in range(n):
        col = a[k:, k] - lower[k:, :r] @ lower[k, :r]
        pivot = col[0]
        if pivot > tol:
            root = math.sqrt(pivot)
            lower[k, r] = root
            lower[k + 1 :, r] = col[1:] / root
            r += 1
        elif pivot < -tol:
            return None
    return lower[:, :r]


def _pinv_cholesky(m: np.ndarray, cutoff: float) -> np.ndarray:
    # PSD input factors directly; otherwise factor M^T M = M^2 and map back
    scale = float(np.max(np.abs(np.diag(m)))) if m.size else 0.0
    lower = full_rank_cholesky(m, cutoff * scale) if scale > 0 else None
    if lower is not None and lower.shape[1] > 0:
        inner = np.linalg.inv(lower.T @ lower)
        return lower @ inner @ inner @ lower.T
    gram = m.T @ m
    gscale = float(np.max(np.diag(gram))) if gram.size else 0.0
    if gscale == 0:
        raise RecoveryError("matrix is zero; pseudo-inverse is degenerate (increase alpha)")
    lower = full_rank_cholesky(gram, cutoff * gscale)
    if lower is None or lower.shape[1] == 0:
        raise RecoveryError("cholesky factorization found no usable pivots (increase alpha)")
    inner = np.linalg.inv(lower.T @ lower)
    return lower @ inner @ inner @ lower.T @ m.T


def _pinv_eigh(m: np.ndarray, cutoff: float) -> np.ndarray:
    vals, vecs = np.linalg.eigh(m)
    top = float(np.max(np.abs(vals))) if vals.size else 0.0
    keep = np.abs(vals) > cutoff * top
    if top == 0 or not keep.any():
        raise RecoveryError("all singular values fall below the cutoff (increase alpha)")
    inv = np.zeros_like(vals)
    inv[keep] = 1.0 / vals[keep]
    return (vecs * inv) @ vecs.T


def penrose_residual(m: np.ndarray, p: np.ndarray) -> float:
    """Relative Frobenius error of ``M P M = M``."""
    norm = np.linalg.norm(m)
    if norm == 0:
        return 0.0
    return float(np.linalg.norm(m @ p @ m - m) / norm)


def pseudo_inverse(m: np.ndarray, cfg: RecoveryConfig = RecoveryConfig()) -> np.ndarray:
    """Moore-Penrose inverse of a symmetric matrix."""
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    if cfg.pinv_strategy is PinvStrategy.SVD:
        return _pinv_eigh(m, cfg.svd_cutoff)
    try:
        p = _pinv_cholesky(m, cfg.svd_cutoff)
    except (RecoveryError, np.linalg.LinAlgError):
        if not cfg.fallback:
            raise
        return _pinv_eigh(m, cfg.svd_cutoff)
    if cfg.fallback and penrose_residual(m, p) > PENROSE_CHECK_TOL:
        return _pinv_eigh(m, cfg.svd_cutoff)
    return p


def double_center(h: np.ndarray) -> np.ndarray:
    """``(I - J/n) H (I - J/n)``."""
    h = np.asarray(h, dtype=np.float64)
    out = h - h.mean(axis=0, keepdims=True)
    out -= out.mean(axis=1, keepdims=True)
    return out


def recover_laplacian(h: np.ndarray, cfg: RecoveryConfig = RecoveryConfig()) -> np.ndarray:
    """Regularized Laplacian estimate ``-2 [(I-J/n) H (I-J/n) + alpha I]^+``."""
    h = np.asarray(h, dtype=np.float64)
    if not np.allclose(h, h.T, rtol=0, atol=1e-12 * max(1.0, float(np.max(np.abs(h), initial=0)))):
        raise ValueError("Katz matrix must be symmetric")
    m = double_center(h)
    m = 0.5 * (m + m.T)
    m[np.diag_indices_from(m)] += cfg.alpha
    lap = -2.0 * pseudo_inverse(m, cfg)
    return 0.5 * (lap + lap.T)


def laplacian_to_graph(lap: np.ndarray, labels: tuple[str, ...] | None = None) -> Graph:
    """Weighted graph with ``w_ij = -L_ij`` for every positive candidate weight."""
    n = lap.shape[0]
    iu, ju = np.triu_indices(n, 1)
    w = -lap[iu, ju]
    keep = w > 0
    edges = tuple(zip(iu[keep].tolist(), ju[keep].tolist()))
    return Graph(n, edges, tuple(w[keep].tolist()), labels)


def row_sum_deviation(lap: np.ndarray) -> float:
    """Scale-free Laplacian validity score ``||L 1|| / ||L||_F`` (0 is perfect)."""
    norm = np.linalg.norm(lap)
    if norm == 0:
        return 0.0
    return float(np.linalg.norm(lap.sum(axis=1)) / norm)


def select_alpha(
    h: np.ndarray,
    cfg: RecoveryConfig = RecoveryConfig(),
    lo: float = 1e-8,
    hi: float = 1e2,
    iters: int = 20,
) -> float:
    """Golden-section search over ``log10(alpha)`` minimizing row-sum deviation."""
    if not 0 < lo < hi:
        raise ValueError("need 0 < lo < hi")
    m = double_center(h)
    m = 0.5 * (m + m.T)

    def score(log_alpha: float) -> float:
        shifted = m.copy()
        shifted[np.diag_indices_from(shifted)] += 10.0 ** log_alpha
        try:
            lap = -2.0 * pseudo_inverse(shifted, cfg)
        except RecoveryError:
            return math.inf
        return row_sum_deviation(lap)

    inv_phi = (math.sqrt(5) - 1) / 2
    a, b = math.log10(lo), math.log10(hi)
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = score(c), score(d)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = score(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = score(d)
    return 10.0 ** (c if fc <= fd else d)
