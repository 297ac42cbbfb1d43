"""Run manifests: one JSON per CLI invocation, enough to reproduce it."""

from __future__ import annotations

import json
import time
from contextlib import contextmanager

from . import __version__


@contextmanager
def manifest_writer(path, command: str, seed, config: dict, inputs: dict, outputs: dict):
    """Collect wall-clock duration and write the manifest on exit.

    Everything except ``duration_seconds`` is deterministic for fixed
    flags, so reruns are byte-identical up to that one field.
    """
    doc = {
        "command": command,
        "seed": seed,
        "config": config,
        "inputs": inputs,
        "outputs": outputs,
        "artifact_version": __version__,
        "warnings": [],
    }
    start = time.monotonic()
    try:
        yield doc
    finally:
        doc["duration_seconds"] = time.monotonic() - start
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
