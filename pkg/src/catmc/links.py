"""Link-function families: category probabilities as functions of a real input.

Two kinds are supported.  ``MultinomialLogitFamily`` assigns category k the
probability proportional to exp(alpha_k + beta_k * x); it is smooth, strictly
positive, and is the family the likelihood solver works with.
``TabularLinkFamily`` is a row-stochastic lookup table over integer inputs
1..K; it may contain zero-probability cells and has no derivative, so it is
supported for sampling and evaluation only.

``smoothness_constants`` computes, by grid search over [-alpha, alpha], the
three constants that control the recovery-error bounds: the largest
log-derivative magnitude L_alpha = sup |f_k'| / f_k, and the infimum /
supremum over x of max_k f_k'(x)^2 / f_k(x).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    DegenerateFamilyError,
    InvalidInputError,
    UnsupportedOperationError,
)

PROB_SUM_TOL = 1e-12
BETA_MINUS_FLOOR = 1e-12


@dataclass(frozen=True)
class MultinomialLogitFamily:
    """K-category family with f_k(x) proportional to exp(alphas[k] + betas[k]*x).

    Parameters are stored in reference-category form: the last category's
    intercept and slope are zero.  Construction normalizes arbitrary
    parameters by subtracting the last entry from all entries, which leaves
    every probability unchanged.
    """

    alphas: np.ndarray
    betas: np.ndarray

    def __post_init__(self):
        alphas = np.asarray(self.alphas, dtype=np.float64).copy()
        betas = np.asarray(self.betas, dtype=np.float64).copy()
        if alphas.ndim != 1 or betas.ndim != 1:
            raise InvalidInputError("alphas and betas must be 1-D")
        if alphas.shape != betas.shape:
            raise InvalidInputError("alphas and betas must have equal length")
        if alphas.shape[0] < 2:
            raise InvalidInputError("need at least 2 categories")
        if not (np.all(np.isfinite(alphas)) and np.all(np.isfinite(betas))):
            raise InvalidInputError("family parameters must be finite")
        alphas -= alphas[-1]
        betas -= betas[-1]
        alphas.setflags(write=False)
        betas.setflags(write=False)
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "betas", betas)

    @property
    def K(self) -> int:
        return self.alphas.shape[0]

    @property
    def is_constant(self) -> bool:
        """True when all slopes are equal, i.e. f does not depend on x."""
        return bool(np.all(self.betas == 0.0))


@dataclass(frozen=True)
class TabularLinkFamily:
    """Row-stochastic K x K table; table[x-1][k-1] = P(category k | input x).

    Defined only on integer inputs 1..K.  Cells may be exactly zero, so
    there is no derivative and the family is excluded from likelihood
    solving.
    """

    table: np.ndarray

    def __post_init__(self):
        table = np.asarray(self.table, dtype=np.float64).copy()
        if table.ndim != 2 or table.shape[0] != table.shape[1]:
            raise InvalidInputError("table must be square (K x K)")
        if table.shape[0] < 2:
            raise InvalidInputError("need at least 2 categories")
        if np.any(table < 0.0) or np.any(table > 1.0):
            raise InvalidInputError("table entries must lie in [0, 1]")
        if np.any(np.abs(table.sum(axis=1) - 1.0) > PROB_SUM_TOL):
            raise InvalidInputError("every table row must sum to 1")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    @property
    def K(self) -> int:
        return self.table.shape[0]


LinkFamily = MultinomialLogitFamily | TabularLinkFamily


@dataclass(frozen=True)
class SmoothnessReport:
    """Grid-search values of the bound-controlling constants on [-alpha, alpha]."""

    L_alpha: float
    beta_minus: float
    beta_plus: float
    grid_size: int


def default_logit_family(K: int, spread: float = 1.0) -> MultinomialLogitFamily:
    """Demonstration family: slopes evenly spaced in [-spread, spread], zero intercepts.

    Produces ordered, overlapping bump-shaped category probabilities.
    """
    if K < 2:
        raise InvalidInputError("need at least 2 categories")
    betas = np.linspace(-spread, spread, K)
    return MultinomialLogitFamily(alphas=np.zeros(K), betas=betas)


def adjacent_confusion_family(K: int) -> TabularLinkFamily:
    """Tabular family where a rating is confused with its neighbors.

    Input x = true rating; the observation equals x with probability 0.6
    and x -/+ 1 with probability 0.2 each, mass clamped at the ends (0.8).
    """
    if K < 2:
        raise InvalidInputError("need at least 2 categories")
    T = np.zeros((K, K))
    for x in range(K):
        if x == 0:
            T[0, 0] = 0.8
            T[0, 1] = 0.2
        elif x == K - 1:
            T[K - 1, K - 1] = 0.8
            T[K - 1, K - 2] = 0.2
        else:
            T[x, x - 1] = 0.2
            T[x, x] = 0.6
            T[x, x + 1] = 0.2
    return TabularLinkFamily(table=T)


def _tabular_rows(family: TabularLinkFamily, x: np.ndarray) -> np.ndarray:
    rounded = np.rint(x)
    if np.any(np.abs(x - rounded) > 1e-9):
        raise InvalidInputError("tabular families are defined on integer inputs only")
    idx = rounded.astype(np.intp)
    if np.any(idx < 1) or np.any(idx > family.K):
        raise InvalidInputError(f"tabular input outside 1..{family.K}")
    return family.table[idx - 1]


def probs_array(family: LinkFamily, x: np.ndarray) -> np.ndarray:
    """Probabilities for a whole array of inputs; shape (n, K)."""
    x = np.ascontiguousarray(x, dtype=np.float64).ravel()
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("inputs must be finite")
    if isinstance(family, MultinomialLogitFamily):
        return _kernels.logit_probs(family.alphas, family.betas, x)
    return _tabular_rows(family, x)


def derivs_array(family: LinkFamily, x: np.ndarray) -> np.ndarray:
    """Probability derivatives for an array of inputs; shape (n, K)."""
    if isinstance(family, TabularLinkFamily):
        raise UnsupportedOperationError("tabular families have no derivatives")
    x = np.ascontiguousarray(x, dtype=np.float64).ravel()
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("inputs must be finite")
    return _kernels.logit_derivs(family.alphas, family.betas, x)


def eval_probs(family: LinkFamily, x: float) -> np.ndarray:
    """Probability vector (f_1(x), ..., f_K(x)) at a single input."""
    return probs_array(family, np.array([x]))[0]


def eval_derivs(family: LinkFamily, x: float) -> np.ndarray:
    """Derivative vector (f_1'(x), ..., f_K'(x)) at a single input."""
    return derivs_array(family, np.array([x]))[0]


def smoothness_constants(
    family: MultinomialLogitFamily, alpha: float, grid_size: int = 4096
) -> SmoothnessReport:
    """Grid search of the bound constants over x in [-alpha, alpha].

    The grid has ``grid_size`` uniformly spaced points including both
    endpoints.  Raises ``DegenerateFamilyError`` when the infimum of
    max_k f_k'^2 / f_k is numerically zero, which happens exactly when
    the family carries no slope information.
    """
    if isinstance(family, TabularLinkFamily):
        raise UnsupportedOperationError("tabular families have no derivatives")
    if alpha <= 0:
        raise InvalidInputError("alpha must be positive")
    if grid_size < 64:
        raise InvalidInputError("grid_size must be at least 64")
    grid = np.linspace(-alpha, alpha, grid_size)
    p = probs_array(family, grid)
    d = derivs_array(family, grid)
    ratio = np.abs(d) / p
    L_alpha = float(ratio.max())
    beta_of_x = (d * d / p).max(axis=1)
    beta_minus = float(beta_of_x.min())
    beta_plus = float(beta_of_x.max())
    if beta_minus < BETA_MINUS_FLOOR:
        raise DegenerateFamilyError(
            "family has (numerically) zero slope information somewhere on "
            f"[-{alpha}, {alpha}]; inf max_k f_k'^2/f_k = {beta_minus:.3e}"
        )
    return SmoothnessReport(
        L_alpha=L_alpha,
        beta_minus=beta_minus,
        beta_plus=beta_plus,
        grid_size=grid_size,
    )


def family_to_json(family: LinkFamily) -> dict:
    """JSON-serializable description of a family."""
    if isinstance(family, MultinomialLogitFamily):
        return {
            "kind": "logit",
            "K": family.K,
            "alphas": family.alphas.tolist(),
            "betas": family.betas.tolist(),
        }
    return {"kind": "tabular", "K": family.K, "table": family.table.tolist()}


def family_from_json(doc: dict | str) -> LinkFamily:
    """Inverse of ``family_to_json``; accepts a dict or a JSON string."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    kind = doc.get("kind")
    if kind == "logit":
        fam = MultinomialLogitFamily(
            alphas=np.asarray(doc["alphas"], dtype=np.float64),
            betas=np.asarray(doc["betas"], dtype=np.float64),
        )
    elif kind == "tabular":
        fam = TabularLinkFamily(table=np.asarray(doc["table"], dtype=np.float64))
    else:
        raise InvalidInputError(f"unknown family kind: {kind!r}")
    if "K" in doc and int(doc["K"]) != fam.K:
        raise InvalidInputError("declared K does not match parameter length")
    return fam
