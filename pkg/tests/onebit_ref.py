"""Stand-alone binary (one-bit) completion used as an independent reference.

Everything here is written from scratch against the binary form of the
model: the first-category probability is sigmoid(a + b x), the
log-likelihood sums log sigmoid / log(1 - sigmoid), and the feasible-set
projection re-implements the singular-value l1 projection, the entry
clamp, and the alternating scheme without importing any solver code.
Algorithmic constants (start point, step rule, tolerances) mirror the
package defaults so that trajectories are comparable point-for-point.
"""

import numpy as np


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def binary_loglik(a, b, x, cats, floor):
    p = _sigmoid(a + b * x)
    pk = np.where(cats == 0, p, 1.0 - p)
    return float(np.log(np.maximum(pk, floor)).sum())


def binary_loglik_grad(a, b, x, cats, floor):
    p = _sigmoid(a + b * x)
    fprime = b * p * (1.0 - p)
    pk = np.where(cats == 0, p, 1.0 - p)
    signed = np.where(cats == 0, fprime, -fprime)
    return (
        float(np.log(np.maximum(pk, floor)).sum()),
        signed / np.maximum(pk, floor),
    )


def _simplex_ball(v, s):
    if v.sum() <= s:
        return v
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    j = np.arange(1, len(v) + 1)
    rho = np.nonzero(u - (css - s) / j > 0)[0][-1]
    theta = (css[rho] - s) / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def _proj_nuclear(X, radius):
    U, s, Vt = np.linalg.svd(X, full_matrices=False)
    if s.sum() <= radius:
        return X
    return (U * _simplex_ball(s, radius)) @ Vt


def _proj_set(X, alpha, radius, tol, max_sweeps):
    Y = X
    p = np.zeros_like(X)
    q = np.zeros_like(X)
    for sweep in range(1, max_sweeps + 1):
        Z = _proj_nuclear(Y + p, radius)
        if sweep == 1 and np.max(np.abs(Z)) <= alpha:
            return Z
        p = Y + p - Z
        W = np.clip(Z + q, -alpha, alpha)
        q = Z + q - W
        delta = np.linalg.norm(W - Y)
        Y = W
        if sweep > 1 and delta < tol:
            break
    return Y


def solve_binary(
    a, b, rows, cols, cats, d1, d2, alpha, radius,
    max_iters=500, grad_tol=1e-5, step_init=1.0, backtrack=0.5,
    armijo_c=1e-4, dykstra_tol=1e-9, dykstra_max=200, floor=1e-12,
):
    """Projected gradient ascent on the binary likelihood; X0 = 0."""

    def value(X):
        return binary_loglik(a, b, X[rows, cols], cats, floor)

    def value_and_grad(X):
        ll, g = binary_loglik_grad(a, b, X[rows, cols], cats, floor)
        G = np.zeros_like(X)
        G[rows, cols] = g
        return ll, G

    X = np.zeros((d1, d2))
    F, G = value_and_grad(X)
    t = step_init
    for _ in range(max_iters):
        accepted = False
        stationary = False
        for trial in range(60):
            Xt = _proj_set(X + t * G, alpha, radius, dykstra_tol, dykstra_max)
            dX = Xt - X
            dn2 = float(np.vdot(dX, dX))
            if trial == 0 and np.sqrt(dn2) / t <= grad_tol:
                stationary = True
                break
            if value(Xt) >= F + (armijo_c / t) * dn2:
                accepted = True
                break
            t *= backtrack
        if stationary or not accepted:
            break
        X = Xt
        F, G = value_and_grad(X)
        t = min(t / backtrack, step_init)
    # terminal feasibility polish, mirroring the solver contract
    X = np.clip(X, -alpha, alpha)
    nuc = np.linalg.svd(X, compute_uv=False).sum()
    if nuc > radius * (1.0 + 1e-7):
        X = X * (radius / nuc)
    return X
