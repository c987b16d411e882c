"""JSON state files: {"dims": [...], "matrix": [[[re, im], ...], ...]} in row-major order."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .qstate import DensityMatrix, StateValidationError


def to_dict(rho: DensityMatrix) -> dict:
    return {
        "dims": list(rho.dims),
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in rho.mat],
    }


def dumps(rho: DensityMatrix) -> str:
    return json.dumps(to_dict(rho)) + "\n"


def from_dict(doc: dict) -> DensityMatrix:
    """Parse a state document. Malformed content raises StateValidationError("format", ...)."""
    try:
        dims = [int(d) for d in doc["dims"]]
        entries = np.asarray(doc["matrix"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise StateValidationError("format", float("nan"), f"format invariant violated: {exc}") from exc
    if entries.ndim != 3 or entries.shape[2] != 2:
        raise StateValidationError(
            "format", float("nan"), f"format invariant violated: matrix entries have shape {entries.shape}"
        )
    return DensityMatrix(entries[..., 0] + 1j * entries[..., 1], tuple(dims))


def load(path: str | Path) -> DensityMatrix:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise StateValidationError("format", float("nan"), f"cannot read state file {path}: {exc}") from exc
    return from_dict(doc)


def save(rho: DensityMatrix, path: str | Path) -> None:
    Path(path).write_text(dumps(rho))
