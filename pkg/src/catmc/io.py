"""Plain-text file formats.

Matrices are dense rows of space-separated ``%.17g`` floats (lossless for
doubles).  Observations come in two layouts:

* ``tsv``   -- ``i<TAB>j<TAB>label`` with 0-based row/column indices;
* ``udata`` -- ``user<TAB>item<TAB>rating<TAB>timestamp`` with 1-based ids
  (the MovieLens ``u.data`` convention); the timestamp is ignored on read
  and written as 0.

Training pairs for link fitting are ``x<TAB>k`` with 1-based category
index k.  Link families and solver configs travel as JSON documents.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .errors import InvalidInputError
from .fitting import TrainingPairs
from .links import LinkFamily, family_from_json, family_to_json
from .sampling import ObservationSet


def write_matrix(path, M: np.ndarray) -> None:
    np.savetxt(path, np.atleast_2d(M), fmt="%.17g")


def read_matrix(path) -> np.ndarray:
    M = np.loadtxt(path, dtype=np.float64)
    return np.atleast_2d(M)


def write_family(path, family: LinkFamily) -> None:
    with open(path, "w") as fh:
        json.dump(family_to_json(family), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_family(path) -> LinkFamily:
    with open(path) as fh:
        return family_from_json(json.load(fh))


def write_observations(path, obs: ObservationSet, fmt: str = "tsv") -> None:
    with open(path, "w") as fh:
        if fmt == "tsv":
            for i, j, v in zip(obs.rows, obs.cols, obs.values):
                fh.write(f"{i}\t{j}\t{v:.17g}\n")
        elif fmt == "udata":
            for i, j, v in zip(obs.rows, obs.cols, obs.values):
                fh.write(f"{i + 1}\t{j + 1}\t{v:.17g}\t0\n")
        else:
            raise InvalidInputError(f"unknown observation format: {fmt!r}")


def _detect_format(path) -> str:
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                return "udata" if len(line.split()) == 4 else "tsv"
    raise InvalidInputError(f"observation file is empty: {path}")


def read_observations(
    path,
    labels=None,
    d1: int | None = None,
    d2: int | None = None,
    fmt: str | None = None,
) -> ObservationSet:
    """Load observations; the format is auto-detected unless given.

    Labels default to the sorted distinct observed values; pass them
    explicitly when some category might be absent from the file.
    """
    fmt = fmt or _detect_format(path)
    raw = np.loadtxt(path, dtype=np.float64, ndmin=2)
    if raw.size == 0:
        raise InvalidInputError(f"observation file is empty: {path}")
    expected_cols = {"tsv": 3, "udata": 4}.get(fmt)
    if expected_cols is None:
        raise InvalidInputError(f"unknown observation format: {fmt!r}")
    if raw.shape[1] != expected_cols:
        raise InvalidInputError(
            f"expected {expected_cols} columns for {fmt!r}, got {raw.shape[1]}"
        )
    rows = raw[:, 0].astype(np.intp)
    cols = raw[:, 1].astype(np.intp)
    values = raw[:, 2]
    if fmt == "udata":
        rows = rows - 1
        cols = cols - 1
    if labels is None:
        labels = np.unique(values)
    labels = np.asarray(labels, dtype=np.float64)
    cats = np.searchsorted(labels, values)
    cats = np.clip(cats, 0, labels.shape[0] - 1)
    if not np.allclose(labels[cats], values, rtol=0.0, atol=1e-9):
        raise InvalidInputError("observed value not among the category labels")
    return ObservationSet(
        d1=d1 if d1 is not None else int(rows.max()) + 1,
        d2=d2 if d2 is not None else int(cols.max()) + 1,
        rows=rows,
        cols=cols,
        cats=cats,
        labels=labels,
    )


def write_training_pairs(path, data: TrainingPairs) -> None:
    with open(path, "w") as fh:
        for x, k in zip(data.xs, data.ks):
            fh.write(f"{x:.17g}\t{k + 1}\n")


def read_training_pairs(path, K: int) -> TrainingPairs:
    raw = np.loadtxt(path, dtype=np.float64, ndmin=2)
    if raw.size == 0 or raw.shape[1] != 2:
        raise InvalidInputError("training pairs must be 'x<TAB>k' lines")
    ks = raw[:, 1]
    if np.any(np.abs(ks - np.rint(ks)) > 1e-9):
        raise InvalidInputError("category indices must be integers")
    return TrainingPairs(xs=raw[:, 0], ks=np.rint(ks).astype(np.intp) - 1, K=K)


def ensure_dir(path) -> str:
    os.makedirs(path, exist_ok=True)
    return path
