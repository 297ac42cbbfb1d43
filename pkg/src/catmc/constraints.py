"""The feasible set searched by the solver.

A candidate matrix X is feasible when every entry lies in [-alpha, alpha]
and the nuclear norm satisfies ||X||_* <= alpha * sqrt(rank * d1 * d2).
The nuclear radius is the convex relaxation of "rank <= rank and
||X||_inf <= alpha": any such X obeys
||X||_* <= sqrt(rank) ||X||_F <= alpha sqrt(rank d1 d2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidInputError


@dataclass(frozen=True)
class ConstraintSpec:
    alpha: float
    rank: int
    d1: int
    d2: int

    def __post_init__(self):
        if self.alpha <= 0 or not math.isfinite(self.alpha):
            raise InvalidInputError("alpha must be positive and finite")
        if self.rank < 1 or self.rank > min(self.d1, self.d2):
            raise InvalidInputError(
                f"rank must lie in 1..min(d1, d2) = {min(self.d1, self.d2)}"
            )
        if self.d1 < 1 or self.d2 < 1:
            raise InvalidInputError("dimensions must be positive")

    @property
    def nuclear_radius(self) -> float:
        return self.alpha * math.sqrt(self.rank * self.d1 * self.d2)
