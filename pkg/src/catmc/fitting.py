"""Maximum-likelihood fitting of logit link parameters from (x, category) pairs.

Maximizes the mean per-pair log-likelihood minus a ridge penalty over the
free parameters (intercept, slope) of the first K-1 categories; the last
category is the reference with both parameters pinned at zero, which makes
the maximizer identified.  The objective is concave, so plain gradient
ascent with Armijo backtracking converges; perfectly separated data drives
the unpenalized parameters to infinity, which surfaces as a
non-convergence warning unless the ridge weight is positive.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InvalidInputError
from .links import MultinomialLogitFamily

_MAX_BACKTRACKS = 60


@dataclass(frozen=True)
class TrainingPairs:
    """Pairs (x_n, k_n): real input and 0-based observed category index."""

    xs: np.ndarray
    ks: np.ndarray
    K: int

    def __post_init__(self):
        xs = np.ascontiguousarray(self.xs, dtype=np.float64)
        ks = np.ascontiguousarray(self.ks, dtype=np.intp)
        if xs.ndim != 1 or xs.shape != ks.shape:
            raise InvalidInputError("xs and ks must be 1-D of equal length")
        if self.K < 2:
            raise InvalidInputError("need at least 2 categories")
        if xs.size == 0:
            raise InvalidInputError("no training pairs")
        if not np.all(np.isfinite(xs)):
            raise InvalidInputError("inputs must be finite")
        if ks.min() < 0 or ks.max() >= self.K:
            raise InvalidInputError("category index out of range")
        if np.unique(ks).size < 2:
            raise InvalidInputError("degenerate data: only one category present")
        if np.unique(xs).size < 2:
            raise InvalidInputError("degenerate data: only one distinct input")
        xs.setflags(write=False)
        ks.setflags(write=False)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ks", ks)

    @property
    def n(self) -> int:
        return self.xs.shape[0]


@dataclass(frozen=True)
class FitConfig:
    max_iters: int = 5000
    grad_tol: float = 1e-8
    step_init: float = 4.0
    backtrack_factor: float = 0.5
    armijo_c: float = 1e-4

    def __post_init__(self):
        if self.max_iters < 1 or self.grad_tol <= 0 or self.step_init <= 0:
            raise InvalidInputError("fit config values must be positive")
        if not 0 < self.backtrack_factor < 1 or not 0 < self.armijo_c < 1:
            raise InvalidInputError("backtrack_factor and armijo_c must lie in (0, 1)")


def _family_from_theta(theta: np.ndarray, K: int) -> MultinomialLogitFamily:
    alphas = np.append(theta[: K - 1], 0.0)
    betas = np.append(theta[K - 1 :], 0.0)
    return MultinomialLogitFamily(alphas=alphas, betas=betas)


def fit_logit(
    data: TrainingPairs,
    reg: float = 1e-6,
    config: FitConfig | None = None,
) -> MultinomialLogitFamily:
    """Fit (alphas, betas) by penalized maximum likelihood.

    The achieved objective is (1/n) sum log f_{k_n}(x_n) minus
    (reg/n) * sum over free categories of (alpha_k^2 + beta_k^2); scaling
    by n leaves the maximizer of the unscaled objective unchanged.
    """
    if reg < 0:
        raise InvalidInputError("ridge weight must be nonnegative")
    config = config or FitConfig()
    K = data.K
    n = data.n
    xs, ks = data.xs, data.ks
    onehot_counts = np.bincount(ks, minlength=K).astype(np.float64)
    onehot_xsums = np.bincount(ks, weights=xs, minlength=K)

    def value_and_grad(theta):
        fam = _family_from_theta(theta, K)
        probs = _kernels.logit_probs(fam.alphas, fam.betas, xs)
        pick = probs[np.arange(n), ks]
        ll = float(np.log(np.maximum(pick, 1e-300)).sum()) / n
        penalty = float(theta @ theta)
        val = ll - reg * penalty / n
        g_alpha = (onehot_counts - probs.sum(axis=0)) / n
        g_beta = (onehot_xsums - xs @ probs) / n
        grad = np.concatenate([g_alpha[: K - 1], g_beta[: K - 1]])
        grad -= 2.0 * reg * theta / n
        return val, grad

    theta = np.zeros(2 * (K - 1))
    F, G = value_and_grad(theta)
    t = config.step_init
    converged = False
    gnorm = float(np.linalg.norm(G))
    for _ in range(config.max_iters):
        if gnorm <= config.grad_tol:
            converged = True
            break
        accepted = False
        for _ in range(_MAX_BACKTRACKS):
            cand = theta + t * G
            Fc, Gc = value_and_grad(cand)
            if Fc >= F + config.armijo_c * t * gnorm * gnorm:
                accepted = True
                break
            t *= config.backtrack_factor
        if not accepted:
            break
        theta, F, G = cand, Fc, Gc
        gnorm = float(np.linalg.norm(G))
        t /= config.backtrack_factor
    else:
        converged = gnorm <= config.grad_tol
    if not converged:
        warnings.warn(
            f"link fit did not reach stationarity (final gradient norm "
            f"{gnorm:.3e}); with separated data try a positive ridge weight",
            stacklevel=2,
        )
    return _family_from_theta(theta, K)


def loglik_of_fit(family: MultinomialLogitFamily, data: TrainingPairs) -> float:
    """Mean per-pair log-likelihood of a family on the given pairs."""
    if family.K != data.K:
        raise InvalidInputError("family K disagrees with the data")
    probs = _kernels.logit_probs(family.alphas, family.betas, data.xs)
    pick = probs[np.arange(data.n), data.ks]
    return float(np.log(np.maximum(pick, 1e-300)).mean())
