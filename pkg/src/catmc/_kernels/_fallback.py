"""Pure-numpy implementations of the hot kernels.

Used whenever the compiled extension is unavailable (or when
``CATMC_PURE_PYTHON=1`` forces it).  Signatures and semantics match
``_core`` exactly; the test suite asserts agreement between backends.
"""

import numpy as np


def logit_probs(alphas, betas, x):
    """Category probabilities softmax(alphas + betas * x_i), shape (n, K).

    Max-subtraction keeps the exponentials finite for large |betas * x|.
    """
    z = alphas[None, :] + x[:, None] * betas[None, :]
    z -= z.max(axis=1, keepdims=True)
    np.exp(z, out=z)
    z /= z.sum(axis=1, keepdims=True)
    return z


def logit_derivs(alphas, betas, x):
    """d/dx of each category probability, shape (n, K).

    Uses p_k * (beta_k - sum_j beta_j p_j); rows sum to zero.
    """
    p = logit_probs(alphas, betas, x)
    slope_mean = p @ betas
    return p * (betas[None, :] - slope_mean[:, None])


def obs_loglik(alphas, betas, x, cats, floor):
    """Sum of log-probabilities of the observed categories.

    Each probability is clamped below at ``floor`` before the log.
    """
    p = logit_probs(alphas, betas, x)
    pk = p[np.arange(x.shape[0]), cats]
    return float(np.log(np.maximum(pk, floor)).sum())


def obs_loglik_grad(alphas, betas, x, cats, floor):
    """Log-likelihood and its derivative w.r.t. each input x_i.

    The derivative is f'_k / max(f_k, floor) for the observed category k,
    which matches finite differences of the clamped objective: where the
    probability underflows the clamp, the ratio is ~0, as is the true
    derivative of the clamped sum.
    """
    n = x.shape[0]
    p = logit_probs(alphas, betas, x)
    slope_mean = p @ betas
    pk = p[np.arange(n), cats]
    deriv_k = pk * (betas[cats] - slope_mean)
    grad = deriv_k / np.maximum(pk, floor)
    ll = float(np.log(np.maximum(pk, floor)).sum())
    return ll, grad
