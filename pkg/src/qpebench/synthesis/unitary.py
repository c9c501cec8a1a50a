"""Validated dense unitaries used as synthesis inputs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

UNITARITY_ATOL = 1e-8


class SynthesisError(ValueError):
    """Raised for non-unitary or unsupported synthesis inputs."""


def unitarity_defect(m: np.ndarray) -> float:
    m = np.asarray(m)
    return float(np.linalg.norm(m.conj().T @ m - np.eye(m.shape[0]), ord=2))


@dataclass(frozen=True, eq=False)
class UnitaryMatrix:
    matrix: np.ndarray
    unitarity_defect: float

    @classmethod
    def of(cls, m, atol: float = UNITARITY_ATOL) -> "UnitaryMatrix":
        if isinstance(m, UnitaryMatrix):
            return m
        arr = np.array(m, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise SynthesisError(f"expected a square matrix, got shape {arr.shape}")
        dim = arr.shape[0]
        if dim < 2 or dim & (dim - 1):
            raise SynthesisError(f"dimension {dim} is not a power of two")
        defect = unitarity_defect(arr)
        if not defect <= atol:
            raise SynthesisError(f"matrix is not unitary (defect {defect:.3e})")
        arr.setflags(write=False)
        return cls(arr, defect)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_qubits(self) -> int:
        return self.dim.bit_length() - 1

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


def as_matrix(u, dim: int | None = None) -> np.ndarray:
    """Validate ``u`` as a unitary (optionally of size ``dim``) and return its array."""
    mat = UnitaryMatrix.of(u).matrix
    if dim is not None and mat.shape[0] != dim:
        raise SynthesisError(f"expected a {dim}x{dim} unitary, got {mat.shape}")
    return mat


def polar_unitary(m: np.ndarray) -> np.ndarray:
    """Nearest unitary to ``m`` in Frobenius norm."""
    w, _, vh = np.linalg.svd(m)
    return w @ vh


def controlled_block(u) -> UnitaryMatrix:
    """``diag(I, u)`` with the control as the most significant qubit."""
    mat = as_matrix(u)
    if mat.shape[0] not in (2, 4):
        raise SynthesisError("controlled blocks are supported for 1 or 2 system qubits")
    d = mat.shape[0]
    out = np.eye(2 * d, dtype=complex)
    out[d:, d:] = mat
    return UnitaryMatrix.of(out)
