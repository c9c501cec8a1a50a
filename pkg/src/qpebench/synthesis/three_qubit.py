"""Three-qubit synthesis by quantum Shannon decomposition.

The cosine-sine split on qubit 0 writes an 8x8 unitary as

    (u1 + u2) . CS(theta) . (v1 + v2)

(``+`` meaning direct sum), where ``CS`` is an RY on qubit 0 multiplexed
by qubits 1 and 2.  Each two-qubit multiplexor ``A0 + A1`` is further split
into ``(I x V)(D + D^dag)(I x W)``, the middle factor being an RZ on qubit 0
multiplexed by qubits 1 and 2.  Two reductions bring the CX count to 20:

* the RY multiplexor is built with CZ gates and its last CZ is absorbed
  into ``u2``;
* every two-qubit block except the first in time is replaced by a 2-CX
  unitary times a diagonal, and the diagonal is pushed through the
  neighbouring multiplexor (it commutes with anything controlled by
  qubits 1 and 2) into the next block.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import cossin, schur

from ..circuit import Circuit, Gate
from .two_qubit import synth_2q
from .unitary import SynthesisError, as_matrix, polar_unitary, unitarity_defect

_YY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))

# sign pattern seen by rotation i of the Gray-code ladder for select state j
_GRAY_SIGNS = np.array(
    [[1, (-1) ** s1, (-1) ** (s1 + s2), (-1) ** s2] for s1 in (0, 1) for s2 in (0, 1)],
    dtype=float,
)
_LADDER_SELECTS = (1, 2, 1, 2)
MUX_ANGLE_CUTOFF = 1e-14
BLOCK_DEFECT_LIMIT = 1e-8


def multiplexed_angles(theta) -> np.ndarray:
    """Ladder angles realising rotation ``theta[j]`` for select state ``j``."""
    return _GRAY_SIGNS.T @ np.asarray(theta, dtype=float) / 4


def multiplexed_rotation(
    kind: str, theta, entangler: str = "CX", drop_last: bool = False
) -> list[Gate]:
    """Rotation ``kind`` on qubit 0 selected by qubits (1, 2).

    Returns an empty list when every angle is negligible.  ``drop_last``
    omits the closing entangler (the caller absorbs it).
    """
    angles = multiplexed_angles(theta)
    if np.all(np.abs(angles) < MUX_ANGLE_CUTOFF):
        return []
    gates = []
    for angle, sel in zip(angles, _LADDER_SELECTS):
        if abs(angle) >= MUX_ANGLE_CUTOFF:
            gates.append(Gate(kind, (0,), float(angle)))
        if entangler == "CX":
            gates.append(Gate("CX", (sel, 0)))
        else:
            gates.append(Gate("CPHASE", (sel, 0), math.pi))
    return gates[:-1] if drop_last else gates


def _unitary_eig(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    t, z = schur(m, output="complex")
    return np.diag(t).copy(), z


def demultiplex(a0: np.ndarray, a1: np.ndarray):
    """Split ``a0 + a1`` into ``V``, the RZ multiplexor angles and ``W``.

    ``a0 = V D W`` and ``a1 = V D^dag W`` with ``D = diag(exp(-i alpha/2))``.
    """
    eigvals, v = _unitary_eig(a0 @ a1.conj().T)
    d = np.sqrt(eigvals)
    w = np.diag(d) @ v.conj().T @ a1
    alpha = -2.0 * np.angle(d)
    return v, alpha, w


def two_cx_times_diagonal(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(A, delta)`` with ``u = A @ diag(delta)`` and ``A`` needing <= 2 CX.

    ``A`` is two-CX iff tr(gamma(A)) is real, with
    gamma(A) = A YY A^T YY on the special-unitary representative; a
    diagonal ``diag(1, f, f, 1)`` on the right is enough to make it so.
    """
    su = u / np.linalg.det(u) ** 0.25
    t = np.diag(su.T @ _YY @ su @ _YY)
    k = np.real(t[0] + t[3] - t[1] - t[2])
    psi = math.atan2(np.imag(np.sum(t)), k)
    f = np.exp(1j * psi)
    right = np.array([1, f, f, 1])
    return u * right[np.newaxis, :], right.conj()


def _checked_block(m: np.ndarray) -> np.ndarray:
    if unitarity_defect(m) > BLOCK_DEFECT_LIMIT:
        return polar_unitary(m)
    return m


def _on_system(c: Circuit) -> list[Gate]:
    return [g.remapped((1, 2)) for g in c.gates]


def synth_3q(u) -> Circuit:
    """At most 20 CX/CZ gates plus single-qubit rotations, global phase exact."""
    mat = as_matrix(u, 8)
    (u1, u2), theta, (v1h, v2h) = cossin(mat, p=4, q=4, separate=True)
    u1, u2, v1h, v2h = (_checked_block(b) for b in (u1, u2, v1h, v2h))

    cs_gates = multiplexed_rotation("RY", 2 * theta, entangler="CZ", drop_last=True)
    if cs_gates:
        # the dropped CZ(q2, q0) equals I + (I x Z) on qubits (1, 2)
        u2 = u2 @ np.diag([1, -1, 1, -1])

    v_r, alpha_r, w_r = demultiplex(v1h, v2h)
    v_l, alpha_l, w_l = demultiplex(u1, u2)

    # walk the two-qubit blocks from last to first in time, pushing diagonals left
    blocks = [w_r, v_r, w_l, v_l]
    circuits: list[Circuit] = [None] * 4
    carry = np.ones(4, dtype=complex)
    for idx in (3, 2, 1):
        block = carry[:, np.newaxis] * blocks[idx]
        two_cx, carry = two_cx_times_diagonal(block)
        circuits[idx] = synth_2q(two_cx)
        if sum(g.is_two_qubit for g in circuits[idx].gates) > 2:
            raise SynthesisError("diagonal extraction left a 3-CX block")
    circuits[0] = synth_2q(carry[:, np.newaxis] * blocks[0])

    gates = (
        _on_system(circuits[0])
        + multiplexed_rotation("RZ", alpha_r)
        + _on_system(circuits[1])
        + cs_gates
        + _on_system(circuits[2])
        + multiplexed_rotation("RZ", alpha_l)
        + _on_system(circuits[3])
    )
    phase = sum(c.global_phase for c in circuits)
    return Circuit(3, tuple(gates), phase)


__all__ = ["synth_3q", "multiplexed_rotation", "multiplexed_angles", "demultiplex"]
