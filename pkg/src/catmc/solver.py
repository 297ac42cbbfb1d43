"""Constrained maximum-likelihood recovery by projected gradient ascent.

The estimator maximizes the categorical log-likelihood

    F(X) = sum over observed cells (i, j) of log f_{k_ij}(X_ij)

over the feasible set of ``ConstraintSpec``: entries in [-alpha, alpha] and
nuclear norm at most alpha * sqrt(rank * d1 * d2).  Steps follow the
projection arc X+ = P_S(X + t * grad F) with Armijo backtracking on the
sufficient-increase condition F(X+) >= F(X) + (c/t) ||X+ - X||_F^2, so the
likelihood never decreases across accepted iterations.

The projection onto the intersection uses Dykstra's alternating scheme
built from two elementary projections: an entrywise clamp for the box and
a singular-value projection onto the l1 ball for the nuclear constraint.
When the nuclear projection alone lands inside the box it is already the
exact projection onto the intersection and no alternation is needed; this
is the common case inside the ascent loop.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, fields

import numpy as np

from . import _kernels
from .constraints import ConstraintSpec
from .errors import (
    DegenerateFamilyError,
    InvalidInputError,
    NumericError,
    UnsupportedOperationError,
)
from .links import MultinomialLogitFamily, smoothness_constants
from .sampling import ObservationSet

NUCLEAR_RESIDUAL_REL = 1e-6
BOX_RESIDUAL_ABS = 1e-9
_MAX_BACKTRACKS = 60


@dataclass(frozen=True)
class SolverConfig:
    max_iters: int = 500
    grad_tol: float = 1e-5
    step_init: float = 1.0
    backtrack_factor: float = 0.5
    armijo_c: float = 1e-4
    dykstra_max: int = 200
    dykstra_tol: float = 1e-9
    prob_floor: float = 1e-12

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) <= 0:
                raise InvalidInputError(f"{f.name} must be positive")
        if not 0 < self.backtrack_factor < 1:
            raise InvalidInputError("backtrack_factor must lie in (0, 1)")
        if not 0 < self.armijo_c < 1:
            raise InvalidInputError("armijo_c must lie in (0, 1)")

    @classmethod
    def from_json(cls, doc: dict | str) -> "SolverConfig":
        """Build a config from a JSON document; missing fields keep defaults."""
        if isinstance(doc, str):
            doc = json.loads(doc)
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise InvalidInputError(f"unknown solver config fields: {sorted(unknown)}")
        return cls(**doc)

    def to_json(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class Estimate:
    """Solver output: the recovered matrix plus diagnostics.

    ``ll_trace`` holds the objective value at the start point and after
    every accepted iteration; it is non-decreasing.
    """

    X: np.ndarray
    iters: int
    final_ll: float
    nuclear_residual: float
    box_residual: float
    converged: bool
    ll_trace: np.ndarray


@dataclass(frozen=True)
class DykstraInfo:
    sweeps: int
    converged: bool
    delta: float


def _svd(X: np.ndarray):
    try:
        return np.linalg.svd(X, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"SVD failed on a {X.shape} matrix: {exc}") from exc


def nuclear_norm(X: np.ndarray) -> float:
    try:
        return float(np.linalg.svd(X, compute_uv=False).sum())
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"SVD failed on a {X.shape} matrix: {exc}") from exc


def _project_sum_ball(v: np.ndarray, s: float) -> np.ndarray:
    """Euclidean projection of a nonnegative vector onto {w >= 0, sum w <= s}."""
    if v.sum() <= s:
        return v
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    counts = np.arange(1, v.shape[0] + 1)
    rho = np.nonzero(u - (css - s) / counts > 0)[0][-1]
    theta = (css[rho] - s) / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def project_box(X: np.ndarray, alpha: float) -> np.ndarray:
    """Entrywise clamp to [-alpha, alpha]; the exact Frobenius projection."""
    if alpha <= 0:
        raise InvalidInputError("alpha must be positive")
    return np.clip(X, -alpha, alpha)


def project_nuclear_ball(X: np.ndarray, radius: float) -> np.ndarray:
    """Frobenius projection onto {Z : ||Z||_* <= radius}.

    Full SVD, then Euclidean projection of the singular values onto the
    l1 ball of the given radius; a feasible X is returned unchanged.
    """
    if radius <= 0:
        raise InvalidInputError("radius must be positive")
    X = np.asarray(X, dtype=np.float64)
    U, s, Vt = _svd(X)
    if s.sum() <= radius:
        return X
    s_proj = _project_sum_ball(s, radius)
    return (U * s_proj) @ Vt


def project_constraint_set(
    X: np.ndarray,
    spec: ConstraintSpec,
    config: SolverConfig | None = None,
    return_info: bool = False,
):
    """Projection onto the intersection of the box and the nuclear ball.

    Dykstra's alternating projections; terminates when successive sweep
    outputs differ by less than ``dykstra_tol`` in Frobenius norm.  On
    non-convergence within ``dykstra_max`` sweeps the last iterate is
    returned with a warning that reports its residuals.
    """
    config = config or SolverConfig()
    X = np.asarray(X, dtype=np.float64)
    if X.shape != (spec.d1, spec.d2):
        raise InvalidInputError("matrix shape disagrees with the constraint spec")
    radius = spec.nuclear_radius
    alpha = spec.alpha

    Y = X
    p = np.zeros_like(X)
    q = np.zeros_like(X)
    converged = False
    delta = math.inf
    sweeps = 0
    for sweeps in range(1, config.dykstra_max + 1):
        Z = project_nuclear_ball(Y + p, radius)
        if sweeps == 1 and np.max(np.abs(Z)) <= alpha:
            # Z lies in both sets and the nuclear ball contains the
            # intersection, so Z is the exact projection.
            info = DykstraInfo(sweeps=1, converged=True, delta=0.0)
            return (Z, info) if return_info else Z
        p = Y + p - Z
        W = project_box(Z + q, alpha)
        q = Z + q - W
        delta = float(np.linalg.norm(W - Y))
        Y = W
        if sweeps > 1 and delta < config.dykstra_tol:
            converged = True
            break
    if not converged:
        nuc_res = max(0.0, nuclear_norm(Y) - radius)
        box_res = max(0.0, float(np.max(np.abs(Y))) - alpha)
        warnings.warn(
            f"Dykstra did not converge in {config.dykstra_max} sweeps "
            f"(last delta {delta:.3e}); residuals: nuclear {nuc_res:.3e}, "
            f"box {box_res:.3e}",
            stacklevel=2,
        )
    info = DykstraInfo(sweeps=sweeps, converged=converged, delta=delta)
    return (Y, info) if return_info else Y


def log_likelihood(
    family: MultinomialLogitFamily, obs: ObservationSet, X: np.ndarray,
    prob_floor: float = SolverConfig.prob_floor,
) -> float:
    """Sum over observed cells of log f_k(X_ij), probabilities floored."""
    _check_solvable(family, obs, X)
    if obs.n_obs == 0:
        return 0.0
    x = np.ascontiguousarray(X[obs.rows, obs.cols], dtype=np.float64)
    return _kernels.obs_loglik(family.alphas, family.betas, x, obs.cats, prob_floor)


def log_likelihood_grad(
    family: MultinomialLogitFamily, obs: ObservationSet, X: np.ndarray,
    prob_floor: float = SolverConfig.prob_floor,
) -> np.ndarray:
    """Gradient of the log-likelihood; zero outside the observed cells."""
    _check_solvable(family, obs, X)
    G = np.zeros_like(X, dtype=np.float64)
    if obs.n_obs == 0:
        return G
    x = np.ascontiguousarray(X[obs.rows, obs.cols], dtype=np.float64)
    _, gvals = _kernels.obs_loglik_grad(
        family.alphas, family.betas, x, obs.cats, prob_floor
    )
    G[obs.rows, obs.cols] = gvals
    return G


def _check_solvable(family, obs: ObservationSet, X: np.ndarray) -> None:
    if not isinstance(family, MultinomialLogitFamily):
        raise UnsupportedOperationError(
            "likelihood solving requires a differentiable (logit) family"
        )
    if family.K != obs.K:
        raise InvalidInputError("family K disagrees with the observations")
    if X.shape != (obs.d1, obs.d2):
        raise InvalidInputError("matrix shape disagrees with the observations")


def feasibility_residuals(X: np.ndarray, spec: ConstraintSpec) -> tuple[float, float]:
    """(nuclear_residual, box_residual) of a candidate matrix."""
    nuc = max(0.0, nuclear_norm(X) - spec.nuclear_radius)
    box = max(0.0, float(np.max(np.abs(X))) - spec.alpha)
    return nuc, box


def maximize_projected(
    value,
    value_and_grad,
    spec: ConstraintSpec,
    config: SolverConfig,
) -> Estimate:
    """Generic engine: maximize a smooth concave objective over the set.

    ``value(X) -> float`` and ``value_and_grad(X) -> (float, ndarray)``
    define the objective.  Starts from the zero matrix (the center of the
    feasible set) and backtracks along the projection arc from a step of
    at most ``step_init``, re-growing toward that cap after accepted
    iterations; stops when the scaled displacement ||X+ - X||_F / t falls
    below ``grad_tol``.  The cap keeps the displacement a sound
    stationarity proxy: far beyond the curvature scale the projected
    point saturates and ||X+ - X|| stops growing with t.
    """
    X = np.zeros((spec.d1, spec.d2))
    F, G = value_and_grad(X)
    trace = [F]
    t = config.step_init
    converged = False
    iters = 0
    for _ in range(config.max_iters):
        accepted = False
        for trial in range(_MAX_BACKTRACKS):
            Xt = project_constraint_set(X + t * G, spec, config)
            dX = Xt - X
            dn2 = float(np.vdot(dX, dX))
            if trial == 0 and math.sqrt(dn2) / t <= config.grad_tol:
                # projection-arc displacement at the working step is the
                # stationarity proxy; checked before the accept test so a
                # float-level plateau at the optimum still counts.
                converged = True
                break
            Ft = value(Xt)
            if Ft >= F + (config.armijo_c / t) * dn2:
                accepted = True
                break
            t *= config.backtrack_factor
        if converged or not accepted:
            break
        iters += 1
        X = Xt
        F, G = value_and_grad(X)
        trace.append(F)
        t = min(t / config.backtrack_factor, config.step_init)
    # Feasibility polish, applied only when a residual would otherwise
    # exceed its contract; the likelihood trace is left untouched.
    if float(np.max(np.abs(X))) > spec.alpha:
        X = project_box(X, spec.alpha)
    nuc = nuclear_norm(X)
    if nuc > spec.nuclear_radius * (1.0 + 0.1 * NUCLEAR_RESIDUAL_REL):
        X = X * (spec.nuclear_radius / nuc)
        nuc = nuclear_norm(X)
    nuclear_residual = max(0.0, nuc - spec.nuclear_radius)
    box_residual = max(0.0, float(np.max(np.abs(X))) - spec.alpha)
    final_ll = value(X)
    return Estimate(
        X=X,
        iters=iters,
        final_ll=final_ll,
        nuclear_residual=nuclear_residual,
        box_residual=box_residual,
        converged=converged,
        ll_trace=np.asarray(trace),
    )


def solve(
    family: MultinomialLogitFamily,
    obs: ObservationSet,
    spec: ConstraintSpec,
    config: SolverConfig | None = None,
) -> Estimate:
    """Maximize the categorical log-likelihood over the constraint set.

    Constant families (all slopes equal) make the objective flat; the
    start point is then already optimal and is returned immediately.
    Families whose slope information underflows numerically on the box
    are rejected, since every theory constant would be meaningless.
    """
    config = config or SolverConfig()
    if obs.n_obs == 0:
        raise InvalidInputError("cannot solve with an empty observation set")
    if (obs.d1, obs.d2) != (spec.d1, spec.d2):
        raise InvalidInputError("observations and constraint spec disagree on shape")
    _check_solvable(family, obs, np.zeros((spec.d1, spec.d2)))
    if not family.is_constant:
        # Raises DegenerateFamilyError when slope information underflows.
        smoothness_constants(family, spec.alpha, grid_size=512)

    def value(X):
        x = np.ascontiguousarray(X[obs.rows, obs.cols], dtype=np.float64)
        return _kernels.obs_loglik(
            family.alphas, family.betas, x, obs.cats, config.prob_floor
        )

    def value_and_grad(X):
        x = np.ascontiguousarray(X[obs.rows, obs.cols], dtype=np.float64)
        ll, gvals = _kernels.obs_loglik_grad(
            family.alphas, family.betas, x, obs.cats, config.prob_floor
        )
        G = np.zeros_like(X)
        G[obs.rows, obs.cols] = gvals
        return ll, G

    return maximize_projected(value, value_and_grad, spec, config)
