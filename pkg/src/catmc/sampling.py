"""Synthetic data generation: ground truth, observation masks, category draws.

Observation cells are included independently with probability m / (d1*d2)
(per-cell Bernoulli, so the realized count is binomial with mean m).
Category responses are drawn per observed cell from the link probabilities
of the underlying entry.

All randomness flows through ``numpy.random.default_rng`` (PCG64) with an
explicit integer seed; masks and draws traverse cells in row-major order,
so identical seeds reproduce identical outputs across runs and platforms.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .constraints import ConstraintSpec
from .errors import InvalidInputError
from .links import LinkFamily, probs_array

NUCLEAR_SLACK_REL = 1e-6
BOX_SLACK_ABS = 1e-9


@dataclass(frozen=True)
class ObservationSet:
    """Sparse categorical observations of a d1 x d2 matrix.

    ``rows``/``cols`` are 0-based cell indices, ``cats`` the 0-based
    category index of each observation, and ``labels`` the strictly
    increasing real values the categories stand for (e.g. ratings 1..5).
    """

    d1: int
    d2: int
    rows: np.ndarray
    cols: np.ndarray
    cats: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        rows = np.ascontiguousarray(self.rows, dtype=np.intp)
        cols = np.ascontiguousarray(self.cols, dtype=np.intp)
        cats = np.ascontiguousarray(self.cats, dtype=np.intp)
        labels = np.asarray(self.labels, dtype=np.float64)
        if not (rows.shape == cols.shape == cats.shape) or rows.ndim != 1:
            raise InvalidInputError("rows, cols, cats must be 1-D of equal length")
        if labels.ndim != 1 or labels.shape[0] < 2:
            raise InvalidInputError("need at least 2 category labels")
        if np.any(np.diff(labels) <= 0):
            raise InvalidInputError("labels must be strictly increasing")
        K = labels.shape[0]
        if rows.size:
            if rows.min() < 0 or rows.max() >= self.d1:
                raise InvalidInputError("row index out of range")
            if cols.min() < 0 or cols.max() >= self.d2:
                raise InvalidInputError("column index out of range")
            if cats.min() < 0 or cats.max() >= K:
                raise InvalidInputError("category index out of range")
            flat = rows * self.d2 + cols
            if np.unique(flat).size != flat.size:
                raise InvalidInputError("duplicate (row, col) observation")
        for name, arr in (("rows", rows), ("cols", cols), ("cats", cats)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @property
    def K(self) -> int:
        return self.labels.shape[0]

    @property
    def n_obs(self) -> int:
        return self.rows.shape[0]

    @property
    def values(self) -> np.ndarray:
        """Observed labels as real values, aligned with rows/cols."""
        return self.labels[self.cats]


@dataclass(frozen=True)
class GroundTruth:
    """A feasible underlying matrix together with its constraint description."""

    M: np.ndarray
    spec: ConstraintSpec

    def __post_init__(self):
        M = np.asarray(self.M, dtype=np.float64)
        if M.shape != (self.spec.d1, self.spec.d2):
            raise InvalidInputError("matrix shape disagrees with the constraint spec")
        if np.max(np.abs(M)) > self.spec.alpha + BOX_SLACK_ABS:
            raise InvalidInputError("entry bound exceeded")
        nuc = float(np.linalg.svd(M, compute_uv=False).sum())
        if nuc > self.spec.nuclear_radius * (1.0 + NUCLEAR_SLACK_REL):
            raise InvalidInputError("nuclear-norm bound exceeded")
        M = M.copy()
        M.setflags(write=False)
        object.__setattr__(self, "M", M)


def sample_mask(d1: int, d2: int, m: float, seed: int) -> np.ndarray:
    """Boolean inclusion mask; each cell kept independently w.p. m/(d1*d2).

    An m above d1*d2 is clamped to full observation (probability 1) with a
    warning, so that observation-budget sweeps may request saturating
    budgets.
    """
    if d1 < 1 or d2 < 1:
        raise InvalidInputError("dimensions must be positive")
    if m <= 0:
        raise InvalidInputError("expected count m must be positive")
    if m > d1 * d2:
        warnings.warn(
            f"m = {m} exceeds the {d1 * d2} cells; sampling the full matrix",
            stacklevel=2,
        )
    p = min(1.0, m / (d1 * d2))
    rng = np.random.default_rng(seed)
    return rng.random((d1, d2)) < p


def sample_observations(
    family: LinkFamily,
    truth: GroundTruth,
    mask: np.ndarray,
    labels,
    seed: int,
) -> ObservationSet:
    """Draw one category per masked cell with probabilities f_k(M_ij)."""
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != truth.M.shape:
        raise InvalidInputError("mask shape disagrees with the truth matrix")
    labels = np.asarray(labels, dtype=np.float64)
    rows, cols = np.nonzero(mask)  # row-major order
    x = truth.M[rows, cols]
    probs = probs_array(family, x)
    if probs.shape[1] != labels.shape[0]:
        raise InvalidInputError("label count disagrees with the family's K")
    rng = np.random.default_rng(seed)
    u = rng.random(rows.shape[0])
    cum = np.cumsum(probs, axis=1)
    cats = (cum < u[:, None]).sum(axis=1)
    np.clip(cats, 0, probs.shape[1] - 1, out=cats)
    return ObservationSet(
        d1=truth.spec.d1, d2=truth.spec.d2, rows=rows, cols=cols,
        cats=cats, labels=labels,
    )


def synth_low_rank(d1: int, d2: int, r: int, alpha: float, seed: int) -> GroundTruth:
    """Random rank-r ground truth scaled to max-entry 0.95 * alpha.

    M = A B^T with standard-normal factors; the 0.95 headroom keeps
    entries strictly interior to the box.
    """
    if r < 1 or r > min(d1, d2):
        raise InvalidInputError(f"r must lie in 1..min(d1, d2) = {min(d1, d2)}")
    if alpha <= 0:
        raise InvalidInputError("alpha must be positive")
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((d1, r))
    B = rng.standard_normal((d2, r))
    M = A @ B.T
    M *= 0.95 * alpha / np.max(np.abs(M))
    return GroundTruth(M=M, spec=ConstraintSpec(alpha=alpha, rank=r, d1=d1, d2=d2))
