"""JSON model files: the on-disk exchange format for GKLS models.

A model file is a single JSON document with the fields

    {
      "label": "qubit-dephasing",
      "dim": 2,
      "omega0": 0.0,
      "hamiltonian": [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-0.5, 0.0]]],
      "noise_ops": [ <matrix>, ... ],
      "charge": <matrix>            # optional conserved charge
    }

where a matrix is a nested array of rows and every entry is a two-element
array [real, imaginary] in decimal notation.  Floats are serialized at
full precision so that exporting and re-loading a model reproduces
results bit for bit.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .model import MarkovModel

__all__ = [
    "ModelFileError",
    "matrix_to_literal",
    "literal_to_matrix",
    "load_model_file",
    "save_model_file",
]


class ModelFileError(ValueError):
    """Malformed model file; carries human-readable position context."""


def matrix_to_literal(matrix: np.ndarray) -> list:
    m = np.asarray(matrix, dtype=complex)
    return [[[float(entry.real), float(entry.imag)] for entry in row] for row in m]


def literal_to_matrix(literal, what: str = "matrix") -> np.ndarray:
    try:
        arr = np.asarray(literal, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ModelFileError(f"{what}: entries must be numbers, got {exc}") from None
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ModelFileError(
            f"{what}: expected rows of [real, imag] pairs, got shape {arr.shape}"
        )
    return arr[:, :, 0] + 1j * arr[:, :, 1]


def _parse_document(text: str, origin: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFileError(
            f"{origin}: line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(doc, dict):
        raise ModelFileError(f"{origin}: top level must be an object")
    return doc


def load_model_file(path) -> tuple[MarkovModel, np.ndarray | None]:
    """Load a model file; returns (model, charge-or-None)."""
    path = Path(path)
    doc = _parse_document(path.read_text(), str(path))
    for key in ("dim", "hamiltonian", "noise_ops"):
        if key not in doc:
            raise ModelFileError(f"{path}: missing required field {key!r}")
    dim = doc["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise ModelFileError(f"{path}: dim must be a positive integer")
    ham = literal_to_matrix(doc["hamiltonian"], "hamiltonian")
    if ham.shape != (dim, dim):
        raise ModelFileError(f"{path}: hamiltonian shape {ham.shape} does not match dim")
    ops = []
    for idx, lit in enumerate(doc["noise_ops"]):
        op = literal_to_matrix(lit, f"noise_ops[{idx}]")
        if op.shape != (dim, dim):
            raise ModelFileError(f"{path}: noise_ops[{idx}] shape {op.shape} "
                                 "does not match dim")
        ops.append(op)
    charge = None
    if doc.get("charge") is not None:
        charge = literal_to_matrix(doc["charge"], "charge")
        if charge.shape != (dim, dim):
            raise ModelFileError(f"{path}: charge shape {charge.shape} does not match dim")
    try:
        model = MarkovModel(
            dim=dim,
            hamiltonian=ham,
            noise_ops=tuple(ops),
            omega0=float(doc.get("omega0", 0.0)),
            label=str(doc.get("label", path.stem)),
        )
    except ValueError as exc:
        raise ModelFileError(f"{path}: {exc}") from None
    return model, charge


def save_model_file(path, model: MarkovModel, charge: np.ndarray | None = None) -> None:
    """Write a model (and optional conserved charge) as a model file."""
    doc = {
        "label": model.label,
        "dim": model.dim,
        "omega0": model.omega0,
        "hamiltonian": matrix_to_literal(model.hamiltonian),
        "noise_ops": [matrix_to_literal(op) for op in model.noise_ops],
    }
    if charge is not None:
        doc["charge"] = matrix_to_literal(charge)
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")
