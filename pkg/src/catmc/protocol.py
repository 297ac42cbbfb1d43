"""End-to-end rating-prediction protocol on a real categorical data set.

Given one file of (user, item, rating) observations, a random split
produces three disjoint parts: a small one to calibrate the link family, a
large one as solver input, and a held-out part for scoring.  The link is
fitted with the observed rating as the regression input, i.e. it is
calibrated as a confusion model around the nominal rating; that is the
only input available before completion.  Rating data is perfectly
separable in that regression (the category IS the input), so the fit
needs a noticeable ridge weight to stay finite; the default here is 1e-2.

All solving happens in centered coordinates (rating minus the label
mean).  The feasible set is symmetric around zero, so centering both
halves the required entry bound and stops the constant offset of a
ratings matrix from consuming most of the nuclear budget; it also keeps
the fitted link's probabilities from underflowing across the box.
Reported labels are always on the original scale.

Two completions are scored on the held-out part: the categorical
maximum-likelihood estimate (predictions by most probable category) and a
least-squares baseline over the same feasible set (predictions by rounding
to the nearest label).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constraints import ConstraintSpec
from .errors import InvalidInputError
from .evaluation import (
    RatingReport,
    predict_categories,
    rating_report,
    real_completion,
    round_to_labels,
)
from .fitting import FitConfig, TrainingPairs, fit_logit
from .links import MultinomialLogitFamily
from .sampling import ObservationSet
from .solver import Estimate, SolverConfig, solve


@dataclass(frozen=True)
class ProtocolResult:
    family: MultinomialLogitFamily
    categorical: RatingReport
    baseline: RatingReport
    categorical_estimate: Estimate
    baseline_estimate: Estimate
    tie_count: int
    split_sizes: tuple[int, int, int]


def default_protocol_config(d1: int, d2: int, rank: int, alpha: float) -> SolverConfig:
    """Solver settings for protocol-scale instances.

    Tolerances scale with the nuclear radius (the stock absolute defaults
    would stall the projections at this scale), and the iteration budget
    is modest: held-out rating error plateaus within a few dozen ascent
    steps while each step costs a full SVD of the rating matrix.
    """
    radius = alpha * (rank * d1 * d2) ** 0.5
    return SolverConfig(
        max_iters=60,
        grad_tol=1e-6 * radius,
        dykstra_tol=max(1e-9, 1e-8 * radius),
        dykstra_max=30,
    )


def _subset(obs: ObservationSet, idx: np.ndarray) -> ObservationSet:
    return ObservationSet(
        d1=obs.d1, d2=obs.d2,
        rows=obs.rows[idx], cols=obs.cols[idx], cats=obs.cats[idx],
        labels=obs.labels,
    )


def split_observations(
    obs: ObservationSet, n_fit: int, n_test: int, seed: int,
    n_solve: int | None = None,
) -> tuple[ObservationSet, ObservationSet, ObservationSet]:
    """Random disjoint (fit, solve, test) split of one observation set."""
    n = obs.n_obs
    if n_solve is None:
        n_solve = n - n_fit - n_test
    if n_fit < 1 or n_test < 1 or n_solve < 1:
        raise InvalidInputError("every split part must be nonempty")
    if n_fit + n_test + n_solve > n:
        raise InvalidInputError(
            f"split sizes {n_fit}+{n_solve}+{n_test} exceed the {n} observations"
        )
    perm = np.random.default_rng(seed).permutation(n)
    fit_idx = np.sort(perm[:n_fit])
    solve_idx = np.sort(perm[n_fit : n_fit + n_solve])
    test_idx = np.sort(perm[n_fit + n_solve : n_fit + n_solve + n_test])
    return _subset(obs, fit_idx), _subset(obs, solve_idx), _subset(obs, test_idx)


def run_protocol(
    obs: ObservationSet,
    rank: int,
    alpha: float | None = None,
    seed: int = 0,
    n_fit: int = 5000,
    n_test: int = 5000,
    n_solve: int | None = None,
    fit_reg: float = 1e-2,
    fit_config: FitConfig | None = None,
    solver_config: SolverConfig | None = None,
) -> ProtocolResult:
    """Split, fit the link, run both completions, score both on held-out cells.

    ``alpha`` is the entry bound in centered units; by default 1.1x the
    label half-range.  Estimates inside the result stay in centered
    units; the reports are on the original label scale.
    """
    center = float(np.mean(obs.labels))
    if alpha is None:
        alpha = 1.1 * float(np.max(np.abs(obs.labels - center)))
    if solver_config is None:
        solver_config = default_protocol_config(obs.d1, obs.d2, rank, alpha)
    fit_part, solve_part, test_part = split_observations(
        obs, n_fit=n_fit, n_test=n_test, n_solve=n_solve, seed=seed
    )
    pairs = TrainingPairs(
        xs=fit_part.values - center, ks=fit_part.cats, K=obs.K
    )
    family = fit_logit(pairs, reg=fit_reg, config=fit_config)
    spec = ConstraintSpec(alpha=alpha, rank=rank, d1=obs.d1, d2=obs.d2)

    categorical_est = solve(family, solve_part, spec, solver_config)
    prediction = predict_categories(family, categorical_est.X, obs.labels)
    categorical_rep = rating_report(test_part, prediction.labels)

    baseline_est = real_completion(
        solve_part.rows, solve_part.cols, solve_part.values - center,
        spec, solver_config,
    )
    baseline_rep = rating_report(
        test_part, round_to_labels(baseline_est.X + center, obs.labels)
    )
    return ProtocolResult(
        family=family,
        categorical=categorical_rep,
        baseline=baseline_rep,
        categorical_estimate=categorical_est,
        baseline_estimate=baseline_est,
        tie_count=prediction.tie_count,
        split_sizes=(fit_part.n_obs, solve_part.n_obs, test_part.n_obs),
    )
