"""ZYZ Euler decomposition of single-qubit unitaries."""

from __future__ import annotations

import math

import numpy as np

from ..circuit import Circuit, Gate
from .unitary import as_matrix

# rotations smaller than this are dropped; the induced error is |angle| / 2
ANGLE_CUTOFF = 1e-14


def zyz_angles(u: np.ndarray) -> tuple[float, float, float, float]:
    """Return ``(phase, alpha, beta, gamma)`` with
    ``u = exp(i*phase) RZ(alpha) RY(beta) RZ(gamma)``.
    """
    u = np.asarray(u, dtype=complex)
    phase = 0.5 * np.angle(np.linalg.det(u))
    v = u * np.exp(-1j * phase)
    cos_half, sin_half = abs(v[1, 1]), abs(v[1, 0])
    beta = 2.0 * math.atan2(sin_half, cos_half)
    if sin_half < 1e-15:
        alpha, gamma = 2.0 * np.angle(v[1, 1]), 0.0
    elif cos_half < 1e-15:
        alpha, gamma = 2.0 * np.angle(v[1, 0]), 0.0
    else:
        total = 2.0 * np.angle(v[1, 1])
        diff = 2.0 * np.angle(v[1, 0])
        alpha, gamma = 0.5 * (total + diff), 0.5 * (total - diff)
    return float(phase), float(alpha), float(beta), float(gamma)


def _wrap(angle: float) -> tuple[float, float]:
    """Map a rotation angle into (-pi, pi]; returns (angle, phase picked up)."""
    turns = math.floor((angle + math.pi) / (2 * math.pi))
    wrapped = angle - 2 * math.pi * turns
    if wrapped <= -math.pi:
        wrapped += 2 * math.pi
        turns -= 1
    # RZ/RY(theta + 2 pi) = -RZ/RY(theta)
    return wrapped, math.pi * (turns % 2)


def rotation_gates(u: np.ndarray, qubit: int = 0) -> tuple[list[Gate], float]:
    """Gates (time order) and global phase implementing a 2x2 unitary."""
    phase, alpha, beta, gamma = zyz_angles(u)
    gates = []
    for kind, angle in (("RZ", gamma), ("RY", beta), ("RZ", alpha)):
        angle, extra = _wrap(angle)
        phase += extra
        if abs(angle) > ANGLE_CUTOFF:
            gates.append(Gate(kind, (qubit,), angle))
    return gates, phase


def synth_1q(u) -> Circuit:
    """At most three rotations (ZYZ) plus a global phase."""
    mat = as_matrix(u, 2)
    gates, phase = rotation_gates(mat)
    return Circuit(1, tuple(gates), phase)
