"""Prediction, rating-error reports, the real-valued baseline, and bound values.

Predictions pick, per cell, the category label whose link probability is
largest at the recovered entry; ties go to the lowest category index and
are counted.  The baseline recovers a real-valued matrix by least squares
over the same feasible set (so the two methods differ only in the loss)
and is evaluated after rounding to the nearest label.

``bound_report`` evaluates the closed-form recovery-error expressions:
two upper-bound variants driven by alpha * K * L_alpha / beta_minus and
one lower bound driven by alpha / sqrt(K * beta_plus), with the unnamed
absolute constants supplied by the caller (default 1.0), so the values are
useful for shapes and slopes rather than as certified numbers.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .constraints import ConstraintSpec
from .errors import InvalidInputError
from .links import LinkFamily, SmoothnessReport, TabularLinkFamily
from .sampling import ObservationSet
from .solver import Estimate, SolverConfig, maximize_projected


@dataclass(frozen=True)
class PredictionResult:
    """Per-cell predicted labels plus the number of argmax ties observed."""

    labels: np.ndarray
    tie_count: int


@dataclass(frozen=True)
class RatingReport:
    """Mean absolute label error, per true category and overall.

    ``overall`` is the count-weighted mean of the per-category means.
    """

    per_category: dict[float, float]
    counts: dict[float, int]
    overall: float

    def to_json(self) -> dict:
        return {
            "per_category": {str(k): v for k, v in self.per_category.items()},
            "counts": {str(k): v for k, v in self.counts.items()},
            "overall": self.overall,
        }

    def to_text(self) -> str:
        """Aligned table: one column per true category plus Overall."""
        cats = sorted(self.per_category)
        header = ["True rating"] + [f"{c:g}" for c in cats] + ["Overall"]
        abs_err = ["Mean |err|"] + [
            f"{self.per_category[c]:.3f}" for c in cats
        ] + [f"{self.overall:.3f}"]
        cnt = ["Count"] + [str(self.counts[c]) for c in cats] + [
            str(sum(self.counts.values()))
        ]
        widths = [max(len(r[i]) for r in (header, abs_err, cnt)) for i in range(len(header))]
        lines = [
            "  ".join(cell.rjust(w) for cell, w in zip(row, widths))
            for row in (header, abs_err, cnt)
        ]
        return "\n".join(lines)


@dataclass(frozen=True)
class BoundReport:
    """Numerical values of the closed-form recovery-error bounds."""

    upper_simple: float
    upper_full: float
    lower: float
    ratio_upper_lower: float
    category_gap_factor: float
    inputs: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "upper_simple": self.upper_simple,
            "upper_full": self.upper_full,
            "lower": self.lower,
            "ratio_upper_lower": self.ratio_upper_lower,
            "category_gap_factor": self.category_gap_factor,
            "inputs": dict(self.inputs),
        }


def predict_categories(
    family: LinkFamily, X: np.ndarray, labels
) -> PredictionResult:
    """Label of the most probable category at every entry of X.

    Tabular families are defined on integers 1..K only; entries outside
    that set are rounded and clamped with a warning.  Ties are broken
    toward the lowest category index and counted.
    """
    X = np.asarray(X, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if isinstance(family, TabularLinkFamily):
        snapped = np.clip(np.rint(X), 1, family.K)
        if np.any(snapped != X):
            warnings.warn(
                "inputs outside the tabular domain 1..K were rounded/clamped",
                stacklevel=2,
            )
        scores = family.table[snapped.astype(np.intp).ravel() - 1]
    else:
        # argmax over k of alpha_k + beta_k x equals argmax of the
        # probabilities; staying on the logit scale keeps ties exact.
        scores = family.alphas[None, :] + X.reshape(-1, 1) * family.betas[None, :]
    if labels.shape[0] != scores.shape[1]:
        raise InvalidInputError("label count disagrees with the family's K")
    best = scores.argmax(axis=1)
    is_tie = (scores == scores[np.arange(scores.shape[0]), best][:, None]).sum(axis=1) > 1
    return PredictionResult(
        labels=labels[best].reshape(X.shape),
        tie_count=int(is_tie.sum()),
    )


def rating_report(test: ObservationSet, predicted: np.ndarray) -> RatingReport:
    """Mean |true label - predicted label| per true category and overall."""
    predicted = np.asarray(predicted, dtype=np.float64)
    if predicted.shape != (test.d1, test.d2):
        raise InvalidInputError("prediction matrix shape disagrees with the test set")
    if test.n_obs == 0:
        raise InvalidInputError("empty test set")
    truths = test.values
    preds = predicted[test.rows, test.cols]
    abs_err = np.abs(truths - preds)
    per_category: dict[float, float] = {}
    counts: dict[float, int] = {}
    for k, label in enumerate(test.labels):
        sel = test.cats == k
        cnt = int(sel.sum())
        if cnt == 0:
            continue
        per_category[float(label)] = float(abs_err[sel].mean())
        counts[float(label)] = cnt
    total = sum(counts.values())
    overall = sum(per_category[c] * counts[c] for c in per_category) / total
    return RatingReport(per_category=per_category, counts=counts, overall=overall)


def round_to_labels(X: np.ndarray, labels) -> np.ndarray:
    """Nearest label per entry, half-up, clamped to the label range."""
    labels = np.asarray(labels, dtype=np.float64)
    mids = 0.5 * (labels[:-1] + labels[1:])
    idx = np.searchsorted(mids, X, side="right")
    return labels[idx]


def squared_loss_objective(rows, cols, values):
    """(value, value_and_grad) closures for the negated squared loss."""
    y = np.asarray(values, dtype=np.float64)

    def value(X):
        diff = X[rows, cols] - y
        return -float(diff @ diff)

    def value_and_grad(X):
        diff = X[rows, cols] - y
        G = np.zeros_like(X)
        G[rows, cols] = -2.0 * diff
        return -float(diff @ diff), G

    return value, value_and_grad


def real_completion(
    rows, cols, values, spec: ConstraintSpec, config: SolverConfig | None = None
) -> Estimate:
    """Least-squares completion of real-valued observations over the set.

    Maximizes the negated sum of (X_ij - y_ij)^2 with the same engine and
    projections as the likelihood solver; ``final_ll`` holds the negated
    loss.
    """
    config = config or SolverConfig()
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise InvalidInputError("cannot solve with an empty observation set")
    if spec.alpha < float(np.max(np.abs(values))):
        raise InvalidInputError("alpha must cover the observed value range")
    value, value_and_grad = squared_loss_objective(rows, cols, values)
    return maximize_projected(value, value_and_grad, spec, config)


def baseline_real_completion(
    obs: ObservationSet,
    spec: ConstraintSpec,
    config: SolverConfig | None = None,
) -> Estimate:
    """Least-squares completion with the observed labels used as values.

    Shares the constraint set and projection machinery with the
    categorical solver, so both outputs satisfy identical feasibility
    contracts; downstream predictions round entries to the nearest label.
    """
    if (obs.d1, obs.d2) != (spec.d1, spec.d2):
        raise InvalidInputError("observations and constraint spec disagree on shape")
    if spec.alpha < float(np.max(np.abs(obs.labels))):
        raise InvalidInputError("alpha must cover the label range")
    return real_completion(obs.rows, obs.cols, obs.values, spec, config)


def mse_per_entry(M: np.ndarray, Mhat: np.ndarray) -> float:
    """Mean squared entrywise difference."""
    M = np.asarray(M, dtype=np.float64)
    Mhat = np.asarray(Mhat, dtype=np.float64)
    if M.shape != Mhat.shape:
        raise InvalidInputError("shape mismatch")
    diff = M - Mhat
    return float(np.mean(diff * diff))


def bound_report(
    smooth: SmoothnessReport,
    spec: ConstraintSpec,
    m: float,
    K: int,
    constants: dict | None = None,
) -> BoundReport:
    """Evaluate the closed-form upper/lower recovery-error bounds.

    constants: {"C_prime": ..., "C1": ..., "C2": ...}, default 1.0 each.
    """
    if m <= 0:
        raise InvalidInputError("m must be positive")
    constants = dict(constants or {})
    c_prime = float(constants.pop("C_prime", 1.0))
    c1 = float(constants.pop("C1", 1.0))
    c2 = float(constants.pop("C2", 1.0))
    if constants:
        raise InvalidInputError(f"unknown constants: {sorted(constants)}")
    d1, d2, r, alpha = spec.d1, spec.d2, spec.rank, spec.alpha
    base = c_prime * alpha * K * smooth.L_alpha / smooth.beta_minus
    decay = math.sqrt(r * (d1 + d2) / m)
    log_lift = math.sqrt(1.0 + (d1 + d2) * math.log(d1 * d2) / m)
    upper_full = base * decay * log_lift
    upper_simple = math.sqrt(2.0) * base * decay
    lower = min(
        c1,
        c2 * alpha / math.sqrt(K * smooth.beta_plus)
        * math.sqrt(r * max(d1, d2) / m),
    )
    gap = (
        K ** 1.5 * smooth.L_alpha * math.sqrt(smooth.beta_plus) / smooth.beta_minus
    )
    return BoundReport(
        upper_simple=upper_simple,
        upper_full=upper_full,
        lower=lower,
        ratio_upper_lower=upper_simple / lower if lower > 0 else math.inf,
        category_gap_factor=gap,
        inputs={
            "K": K,
            "L_alpha": smooth.L_alpha,
            "beta_minus": smooth.beta_minus,
            "beta_plus": smooth.beta_plus,
            "alpha": alpha,
            "rank": r,
            "d1": d1,
            "d2": d2,
            "m": m,
            "C_prime": c_prime,
            "C1": c1,
            "C2": c2,
        },
    )
