"""KL divergence and squared Hellinger distance for categorical distributions.

Besides the two scalar divergences and their matrix-averaged forms, this
module evaluates two closed-form bounds as checkable quantities: a
quadratic-ratio upper bound on the KL divergence, and the slack of the
curvature lower bound that relates the average squared Hellinger distance
between linked matrices to their per-entry mean squared difference.

Natural logarithm throughout.  An infinite KL divergence (p_k > 0 where
q_k = 0, which arises legitimately with tabular families) is returned as
``math.inf``, not raised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidInputError
from .links import LinkFamily, MultinomialLogitFamily, probs_array

_SUM_TOL = 1e-9


class DivergenceKind(str, Enum):
    KL = "kl"
    HELLINGER_SQ = "hellinger_sq"


@dataclass(frozen=True)
class DivergenceReport:
    value: float
    kind: DivergenceKind
    per_entry: np.ndarray | None = None


def _check_prob_vector(p: np.ndarray, name: str) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 1:
        raise InvalidInputError(f"{name} must be a 1-D probability vector")
    if np.any(p < 0.0) or not np.all(np.isfinite(p)):
        raise InvalidInputError(f"{name} must be nonnegative and finite")
    if abs(p.sum() - 1.0) > _SUM_TOL:
        raise InvalidInputError(f"{name} must sum to 1 (got {p.sum()!r})")
    return p


def kl_categorical(p, q) -> float:
    """sum_k p_k log(p_k / q_k), with 0 log 0 = 0; inf when p>0 meets q=0."""
    p = _check_prob_vector(p, "p")
    q = _check_prob_vector(q, "q")
    if p.shape != q.shape:
        raise InvalidInputError("p and q must have the same length")
    support = p > 0.0
    if np.any(q[support] == 0.0):
        return math.inf
    ps = p[support]
    return float(np.sum(ps * np.log(ps / q[support])))


def hellinger_sq(p, q) -> float:
    """sum_k (sqrt(p_k) - sqrt(q_k))^2; lies in [0, 2]."""
    p = _check_prob_vector(p, "p")
    q = _check_prob_vector(q, "q")
    if p.shape != q.shape:
        raise InvalidInputError("p and q must have the same length")
    diff = np.sqrt(p) - np.sqrt(q)
    return float(np.sum(diff * diff))


def _rowwise_kl(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    support = P > 0.0
    bad = support & (Q == 0.0)
    safe_p = np.where(support, P, 1.0)
    safe_q = np.where(Q > 0.0, Q, 1.0)
    terms = np.where(support, P * np.log(safe_p / safe_q), 0.0)
    out = terms.sum(axis=1)
    out[bad.any(axis=1)] = math.inf
    return out


def _rowwise_hellinger_sq(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    diff = np.sqrt(P) - np.sqrt(Q)
    return (diff * diff).sum(axis=1)


def avg_matrix_divergence(
    family: LinkFamily,
    P: np.ndarray,
    Q: np.ndarray,
    kind: DivergenceKind | str = DivergenceKind.HELLINGER_SQ,
    per_entry: bool = False,
) -> DivergenceReport:
    """Mean entrywise divergence of the linked distributions of two matrices.

    For matrices P, Q of equal shape, computes the divergence between the
    category distributions f(P_ij) and f(Q_ij) at every cell and averages
    over all d1*d2 cells.
    """
    kind = DivergenceKind(kind)
    P = np.asarray(P, dtype=np.float64)
    Q = np.asarray(Q, dtype=np.float64)
    if P.shape != Q.shape or P.ndim != 2:
        raise InvalidInputError("P and Q must be 2-D matrices of equal shape")
    fp = probs_array(family, P)
    fq = probs_array(family, Q)
    if kind is DivergenceKind.KL:
        cells = _rowwise_kl(fp, fq)
    else:
        cells = _rowwise_hellinger_sq(fp, fq)
    value = float(np.mean(cells))
    return DivergenceReport(
        value=value,
        kind=kind,
        per_entry=cells.reshape(P.shape) if per_entry else None,
    )


def kl_upper_bound(p, q) -> float:
    """Quadratic-ratio upper bound on kl_categorical(p, q).

    sum over k < K of
      [(p_k-q_k)^2 + (p_k q_k - p_k^2)(1-q_K) + (p_k q_k - q_k^2)(1-p_K)]
        / [q_k (1 - sum_{i<K} q_i)].
    Requires q strictly positive.
    """
    p = _check_prob_vector(p, "p")
    q = _check_prob_vector(q, "q")
    if p.shape != q.shape:
        raise InvalidInputError("p and q must have the same length")
    if np.any(q == 0.0):
        raise InvalidInputError("q must be strictly positive")
    K = p.shape[0]
    pk, qk = p[: K - 1], q[: K - 1]
    q_last_complement = 1.0 - qk.sum()
    num = (
        (pk - qk) ** 2
        + (pk * qk - pk * pk) * (1.0 - q[K - 1])
        + (pk * qk - qk * qk) * (1.0 - p[K - 1])
    )
    return float(np.sum(num / (qk * q_last_complement)))


def hellinger_lb_gap(
    family: MultinomialLogitFamily,
    M: np.ndarray,
    Mhat: np.ndarray,
    alpha: float,
    beta_minus: float,
) -> float:
    """Slack of the curvature lower bound on the average Hellinger distance.

    Returns  d_H^2(f(M), f(Mhat)) - (beta_minus / 4) * ||M - Mhat||_F^2 / (d1 d2),
    which is nonnegative whenever beta_minus is a valid infimum of
    max_k f_k'^2 / f_k over [-alpha, alpha] and both matrices stay in the box.
    """
    M = np.asarray(M, dtype=np.float64)
    Mhat = np.asarray(Mhat, dtype=np.float64)
    if M.shape != Mhat.shape or M.ndim != 2:
        raise InvalidInputError("M and Mhat must be 2-D matrices of equal shape")
    if np.max(np.abs(M)) > alpha or np.max(np.abs(Mhat)) > alpha:
        raise InvalidInputError(f"all entries must lie in [-{alpha}, {alpha}]")
    avg_h = avg_matrix_divergence(family, M, Mhat, DivergenceKind.HELLINGER_SQ).value
    mse = float(np.mean((M - Mhat) ** 2))
    return avg_h - 0.25 * beta_minus * mse
