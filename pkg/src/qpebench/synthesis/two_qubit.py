"""Two-qubit synthesis through the Cartan (KAK) decomposition.

Every ``u`` in U(4) factors as

    u = exp(i*phase) (L0 (x) L1) Can(a, b, c) (R0 (x) R1),
    Can(a, b, c) = exp(i (a XX + b YY + c ZZ)),

with ``(a, b, c)`` brought into the Weyl chamber
``pi/4 >= a >= b >= |c|`` (``c >= 0`` when ``a == pi/4``).  The number of
CX gates needed (0-3) is read off the chamber point, and the circuit is
assembled from a fixed template with that many CX gates whose own KAK
locals are absorbed into the target's.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..circuit import Circuit, Gate, unitary_of
from .one_qubit import rotation_gates
from .unitary import SynthesisError, as_matrix

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_PAULIS = (_X, _Y, _Z)
_S = np.diag([1, 1j])
_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_RX_HALF_PI = np.array([[1, -1j], [-1j, 1]], dtype=complex) / math.sqrt(2)

# columns are the magic (Bell-like) basis; SU(2) x SU(2) becomes SO(4) in it
MAGIC = np.array(
    [[1, 0, 0, 1j], [0, 1j, 1, 0], [0, 1j, -1, 0], [1, 0, 0, -1j]], dtype=complex
) / math.sqrt(2)
MAGIC_DAG = MAGIC.conj().T

# eigenvalues of XX, YY, ZZ on each magic basis vector, plus a phase column
_SIGNS = np.real(
    np.array(
        [
            [np.vdot(MAGIC[:, j], np.kron(p, p) @ MAGIC[:, j]) for p in _PAULIS] + [1.0]
            for j in range(4)
        ]
    )
)
_SIGNS_INV = np.linalg.inv(_SIGNS)

WEYL_ATOL = 1e-10
_EIG_MIXES = (1.0, 0.5772156649015329, 2.718281828459045, 0.3183098861837907, 7.3890560989306495)


def canonical_gate(a: float, b: float, c: float) -> np.ndarray:
    """``exp(i (a XX + b YY + c ZZ))``, built from its magic-basis diagonal."""
    phases = _SIGNS[:, :3] @ np.array([a, b, c])
    return MAGIC @ np.diag(np.exp(1j * phases)) @ MAGIC_DAG


def kron_factor(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split a 4x4 tensor product ``A (x) B`` into unitary factors."""
    blocks = m.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    u, s, vh = np.linalg.svd(blocks)
    a = u[:, 0].reshape(2, 2) * math.sqrt(s[0])
    b = vh[0].reshape(2, 2) * math.sqrt(s[0])
    # give both factors unit determinant magnitude, phases stay in the product
    scale = np.sqrt(np.linalg.det(a))
    return a / scale, b * scale


@dataclass
class KAK:
    """``u = exp(i*phase) (left[0] (x) left[1]) Can(coords) (right[0] (x) right[1])``."""

    phase: float
    left: tuple[np.ndarray, np.ndarray]
    coords: tuple[float, float, float]
    right: tuple[np.ndarray, np.ndarray]

    def matrix(self) -> np.ndarray:
        return (
            np.exp(1j * self.phase)
            * np.kron(*self.left)
            @ canonical_gate(*self.coords)
            @ np.kron(*self.right)
        )

    # Each move below rewrites the factorisation without changing the product.

    def _shift(self, axis: int, n: int) -> None:
        # Can(v) = Can(v - n pi/2) (i P (x) P)^n
        if n == 0:
            return
        coords = list(self.coords)
        coords[axis] -= n * math.pi / 2
        self.coords = tuple(coords)
        p = np.linalg.matrix_power(_PAULIS[axis], n % 2)
        self.right = (p @ self.right[0], p @ self.right[1])
        self.phase += n * math.pi / 2

    def _negate(self, i: int, j: int) -> None:
        # the Pauli on the remaining axis anticommutes with axes i and j
        q = _PAULIS[3 - i - j]
        coords = list(self.coords)
        coords[i], coords[j] = -coords[i], -coords[j]
        self.coords = tuple(coords)
        self.left = (self.left[0] @ q, self.left[1])
        self.right = (q @ self.right[0], self.right[1])

    def _swap(self, i: int, j: int) -> None:
        g = {(0, 1): _S, (0, 2): _H, (1, 2): _RX_HALF_PI}[(min(i, j), max(i, j))]
        gd = g.conj().T
        coords = list(self.coords)
        coords[i], coords[j] = coords[j], coords[i]
        self.coords = tuple(coords)
        self.left = (self.left[0] @ g, self.left[1] @ g)
        self.right = (gd @ self.right[0], gd @ self.right[1])

    def canonicalize(self, atol: float = WEYL_ATOL) -> "KAK":
        for axis in range(3):
            self._shift(axis, round(self.coords[axis] / (math.pi / 2)))
        for _ in range(3):
            for i in range(2):
                if abs(self.coords[i]) < abs(self.coords[i + 1]):
                    self._swap(i, i + 1)
        if self.coords[0] < 0:
            self._negate(0, 2)
        if self.coords[1] < 0:
            self._negate(1, 2)
        if self.coords[0] > math.pi / 4 - atol and self.coords[2] < 0:
            self._shift(0, 1)
            self._negate(0, 2)
        return self


def _real_orthogonal_eigvecs(m: np.ndarray) -> np.ndarray:
    """Real orthogonal P diagonalising a complex symmetric unitary ``m``.

    Re(m) and Im(m) commute, so a generic real combination of them shares
    their eigenvectors; the best of a few fixed mixes is kept.
    """
    best, best_err = None, np.inf
    for mix in _EIG_MIXES:
        _, p = np.linalg.eigh(m.real + mix * m.imag)
        d = p.T @ m @ p
        err = np.linalg.norm(d - np.diag(np.diag(d)))
        if err < best_err:
            best, best_err = p, err
        if err < 1e-14:
            break
    if best_err > 1e-9:  # pragma: no cover - requires adversarial degeneracy
        raise SynthesisError("could not diagonalise the magic-basis product")
    if np.linalg.det(best) < 0:
        best[:, 0] = -best[:, 0]
    return best


def kak_decompose(u) -> KAK:
    mat = as_matrix(u, 4)
    det_phase = np.angle(np.linalg.det(mat)) / 4
    su = mat * np.exp(-1j * det_phase)
    up = MAGIC_DAG @ su @ MAGIC
    m = up.T @ up
    p = _real_orthogonal_eigvecs(m)
    theta = np.angle(np.diag(p.T @ m @ p))
    half = theta / 2
    # det(K1) must be +1, which needs sum(half) == 0 mod 2 pi
    if math.cos(float(np.sum(half))) < 0:
        half[0] += math.pi
    k1 = (up @ p @ np.diag(np.exp(-1j * half))).real
    left = kron_factor(MAGIC @ k1 @ MAGIC_DAG)
    right = kron_factor(MAGIC @ p.T @ MAGIC_DAG)
    a, b, c, g = _SIGNS_INV @ half
    kak = KAK(float(det_phase + g), left, (float(a), float(b), float(c)), right)
    return kak.canonicalize()


def weyl_coordinates(u) -> tuple[float, float, float]:
    return kak_decompose(u).coords


def num_cx_required(coords: tuple[float, float, float], atol: float = WEYL_ATOL) -> int:
    a, b, c = coords
    if abs(a) < atol and abs(b) < atol and abs(c) < atol:
        return 0
    if abs(a - math.pi / 4) < atol and abs(b) < atol and abs(c) < atol:
        return 1
    if abs(c) < atol:
        return 2
    return 3


def _template(n_cx: int, coords: tuple[float, float, float]) -> list[Gate]:
    """Fixed circuit with ``n_cx`` CX gates, locally equivalent to ``Can(coords)``."""
    a, b, c = coords
    if n_cx == 1:
        return [Gate("CX", (0, 1))]
    if n_cx == 2:
        # CX (exp(iaX) (x) exp(ibZ)) CX = exp(i(a XX + b ZZ))
        return [
            Gate("CX", (0, 1)),
            Gate("RX", (0,), -2 * a),
            Gate("RZ", (1,), -2 * b),
            Gate("CX", (0, 1)),
        ]
    return [
        Gate("RZ", (1,), math.pi / 2),
        Gate("CX", (1, 0)),
        Gate("RZ", (0,), -2 * c - math.pi / 2),
        Gate("RY", (1,), math.pi / 2 - 2 * a),
        Gate("CX", (0, 1)),
        Gate("RY", (1,), 2 * b - math.pi / 2),
        Gate("CX", (1, 0)),
        Gate("RZ", (0,), -math.pi / 2),
    ]


def _local_gates(m0: np.ndarray, m1: np.ndarray) -> tuple[list[Gate], float]:
    g0, p0 = rotation_gates(m0, 0)
    g1, p1 = rotation_gates(m1, 1)
    return g0 + g1, p0 + p1


def _merge_locals(gates: list[Gate]) -> tuple[list[Gate], float]:
    """Fold consecutive single-qubit gates of a 2-qubit circuit into one ZYZ run each."""
    out: list[Gate] = []
    pending: dict[int, np.ndarray] = {}
    phase = 0.0

    def flush(q: int) -> None:
        nonlocal phase
        if q in pending:
            g, p = rotation_gates(pending.pop(q), q)
            out.extend(g)
            phase += p

    for g in gates:
        if g.is_two_qubit:
            for q in g.qubits:
                flush(q)
            out.append(g)
        else:
            q = g.qubits[0]
            pending[q] = g.matrix() @ pending.get(q, _I2)
    for q in sorted(pending):
        flush(q)
    return out, phase


def synth_2q(u, n_cx: int | None = None) -> Circuit:
    """At most three CX gates plus single-qubit rotations, global phase exact.

    ``n_cx`` forces a template size at least the required count (used by
    callers that already know the structure).
    """
    mat = as_matrix(u, 4)
    target = kak_decompose(mat)
    needed = num_cx_required(target.coords)
    count = needed if n_cx is None else max(n_cx, needed)
    if count == 0:
        gates, phase = _local_gates(
            target.left[0] @ target.right[0], target.left[1] @ target.right[1]
        )
        return Circuit(2, tuple(gates), target.phase + phase)

    core = _template(count, target.coords)
    core_kak = kak_decompose(unitary_of(Circuit(2, tuple(core))))
    # u = e^{i(pt - pc)} (Lt Lc^dag) core (Rc^dag Rt)
    before = (
        core_kak.right[0].conj().T @ target.right[0],
        core_kak.right[1].conj().T @ target.right[1],
    )
    after = (
        target.left[0] @ core_kak.left[0].conj().T,
        target.left[1] @ core_kak.left[1].conj().T,
    )
    pre, p_pre = _local_gates(*before)
    post, p_post = _local_gates(*after)
    gates, p_merge = _merge_locals(pre + core + post)
    return Circuit(2, tuple(gates), target.phase - core_kak.phase + p_pre + p_post + p_merge)
