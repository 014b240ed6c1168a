"""JSON wire formats shared by all modules.

Complex matrices are row-major nested lists of ``[re, im]`` pairs; Fock
states are plain integer arrays. Run manifests carry the library version
and a SHA-256 hash of the canonical JSON of the run configuration.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

import numpy as np

from . import __version__


def complex_matrix_to_json(A) -> list:
    A = np.asarray(A, dtype=complex)
    if A.ndim == 1:
        return [[float(z.real), float(z.imag)] for z in A]
    return [[[float(z.real), float(z.imag)] for z in row] for row in A]


def complex_matrix_from_json(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def fock_state_to_json(state) -> list[int]:
    occ = getattr(state, "occupations", state)
    return [int(k) for k in occ]


def round_sig(x: float, digits: int = 12) -> float:
    """Round to ``digits`` significant digits (for stable JSON output)."""
    x = float(x)
    if x == 0 or not np.isfinite(x):
        return x
    return float(f"{x:.{digits - 1}e}")


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(config: dict) -> str:
    return hashlib.sha256(canonical_json(config).encode()).hexdigest()


def manifest(config: dict) -> dict:
    """Reproducibility header embedded in every emitted artifact."""
    return {
        "library": "loninv",
        "version": __version__,
        "config": config,
        "config_hash": config_hash(config),
    }


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
