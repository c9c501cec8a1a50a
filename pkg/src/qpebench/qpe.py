"""Multi-ancilla phase estimation circuits.

Layout: readout qubits ``0..k-1`` then the system register.  Readout
qubit ``j`` controls ``U**(2**(k-1-j))``, so the readout register holds
the big-endian Fourier state of the phase before the inverse transform.
Blocks are emitted from the smallest power to the largest.  The inverse
transform has no SWAP gates and leaves the phase bits reversed, which
``phases.decode_phase`` undoes.

Every controlled power is a 2- or 3-qubit unitary, synthesised from its
matrix.  Powers come from one diagonalisation of ``U``; each eigenphase
is multiplied by ``2**i`` and reduced mod 2 pi in extended precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import schur

from .circuit import Circuit, Gate, compose, unitary_of
from .ddmath import angle_to_turns, turns_to_angle
from .hamiltonian import PauliSum, exact_eigs, lowest_basis_state, to_matrix
from .hamiltonian.pauli import pauli_action
from .phases import on_window_edge, phase_to_energy
from .synthesis import controlled_block, synth_1q, synth_2q, synthesize
from .synthesis.unitary import UnitaryMatrix

MAX_SYSTEM_QUBITS = 2
MAX_POWER_INDEX = 60
NORM_ATOL = 1e-10


class QpeError(ValueError):
    pass


@dataclass(frozen=True)
class EvolutionSpec:
    """``U = [prod_j exp(2 pi i (t/n) c_j P_j)]**n``; the offset is left out."""

    hamiltonian: PauliSum
    t: float = 0.5
    n_trotter: int = 1
    term_order: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if not self.t > 0:
            raise QpeError("evolution time must be positive")
        if int(self.n_trotter) != self.n_trotter or self.n_trotter < 1:
            raise QpeError("n_trotter must be a positive integer")
        object.__setattr__(self, "n_trotter", int(self.n_trotter))
        object.__setattr__(self, "t", float(self.t))
        if self.term_order is not None:
            order = tuple(str(p) for p in self.term_order)
            self.hamiltonian.reordered(order)  # validates
            object.__setattr__(self, "term_order", order)

    @property
    def ordered_terms(self) -> tuple:
        h = self.hamiltonian
        if self.term_order is not None:
            h = h.reordered(self.term_order)
        return h.terms

    @property
    def n_system(self) -> int:
        return self.hamiltonian.n_qubits


@dataclass(frozen=True, eq=False)
class QpeSpec:
    evolution: EvolutionSpec
    k: int
    initial_state: str | Sequence[complex] | None = None
    window_center: float | None = None
    _state: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if int(self.k) != self.k or self.k < 1:
            raise QpeError("k must be a positive integer")
        object.__setattr__(self, "k", int(self.k))
        ns = self.evolution.n_system
        init = self.initial_state
        if init is None:
            init = lowest_basis_state(self.evolution.hamiltonian)
            object.__setattr__(self, "initial_state", init)
        if isinstance(init, str):
            if len(init) != ns or set(init) - {"0", "1"}:
                raise QpeError(f"initial state {init!r} is not a {ns}-bit string")
            vec = np.zeros(2**ns, dtype=complex)
            vec[int(init, 2)] = 1.0
        else:
            vec = np.asarray(init, dtype=complex).ravel()
            if vec.shape != (2**ns,):
                raise QpeError(f"amplitude vector must have length {2**ns}")
            if abs(np.linalg.norm(vec) - 1.0) > NORM_ATOL:
                raise QpeError("amplitude vector is not normalised")
            object.__setattr__(self, "initial_state", tuple(complex(a) for a in vec))
        vec.setflags(write=False)
        object.__setattr__(self, "_state", vec)

    @property
    def state_vector(self) -> np.ndarray:
        return self._state

    @property
    def n_system(self) -> int:
        return self.evolution.n_system

    @property
    def offset(self) -> float:
        return self.evolution.hamiltonian.offset

    def resolved_window_center(self) -> float:
        """Caller's window centre, else the lowest exact eigenvalue (offset included)."""
        if self.window_center is not None:
            return float(self.window_center)
        return float(exact_eigs(self.evolution.hamiltonian)[0])


def pauli_exponential(pauli, angle: float) -> np.ndarray:
    """``exp(i angle P) = cos(angle) I + i sin(angle) P``."""
    flip, phase = pauli_action(pauli)
    dim = phase.size
    m = np.zeros((dim, dim), dtype=complex)
    cols = np.arange(dim)
    m[cols, cols] = math.cos(angle)
    m[cols ^ flip, cols] += 1j * math.sin(angle) * phase
    return m


def trotterized_unitary(spec: EvolutionSpec) -> np.ndarray:
    """Lie-Trotter product, matrix product taken in term order."""
    ns = spec.n_system
    if not 1 <= ns <= MAX_SYSTEM_QUBITS:
        raise QpeError(f"system register must have 1-{MAX_SYSTEM_QUBITS} qubits, got {ns}")
    step = np.eye(2**ns, dtype=complex)
    for p, c in spec.ordered_terms:
        step = step @ pauli_exponential(p, 2 * math.pi * spec.t * c / spec.n_trotter)
    return np.linalg.matrix_power(step, spec.n_trotter)


def exact_unitary(spec: EvolutionSpec) -> np.ndarray:
    """``exp(2 pi i t H)`` without the offset, by diagonalisation."""
    h = PauliSum(spec.n_system, spec.hamiltonian.terms, 0.0)
    w, v = np.linalg.eigh(to_matrix(h))
    return (v * np.exp(2j * math.pi * spec.t * w)) @ v.conj().T


def unitary_eigensystem(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenphases and orthonormal eigenvectors (complex Schur form)."""
    t, z = schur(np.asarray(u, dtype=complex), output="complex")
    return np.angle(np.diag(t)), z


@dataclass(frozen=True)
class EigenPhase:
    phase: float
    energy: float
    ambiguous: bool


def eigenphase_table(
    u, t: float, window_center: float = 0.0, offset: float = 0.0
) -> list[EigenPhase]:
    """Phases ``arg(lambda)/2pi mod 1`` with energies on the requested branch.

    ``ambiguous`` marks phases whose energy sits on the window edge, where the
    two branches are equally plausible.
    """
    mat = UnitaryMatrix.of(u).matrix
    if mat.shape[0] > 4:
        raise QpeError("eigenphase tables are limited to 2 system qubits")
    thetas, _ = unitary_eigensystem(mat)
    rows = []
    for theta in thetas:
        phase = float(angle_to_turns(theta).hi) % 1.0
        energy = phase_to_energy(phase, t, window_center, offset)
        rows.append(EigenPhase(phase, energy, on_window_edge(energy, t, window_center)))
    return sorted(rows, key=lambda r: (r.energy, r.phase))


def power_phases(u, i: int) -> np.ndarray:
    """``u**(2**i)`` with eigenphases scaled by ``2**i`` and reduced mod 2 pi
    in extended precision."""
    if not 0 <= i <= MAX_POWER_INDEX:
        raise QpeError(f"power index must lie in [0, {MAX_POWER_INDEX}]")
    mat = UnitaryMatrix.of(u).matrix
    if mat.shape[0] > 4:
        raise QpeError("power_phases is limited to 2 system qubits")
    thetas, z = unitary_eigensystem(mat)
    doubled = np.array([turns_to_angle(angle_to_turns(th, i)) for th in thetas])
    return (z * np.exp(1j * doubled)) @ z.conj().T


def power_by_recompilation(u, i: int) -> np.ndarray:
    """``u**(2**i)`` by squaring a synthesised circuit and resynthesising it.

    This is the circuit-level route; plain double precision limits it to
    small ``i``.
    """
    c = synthesize(u)
    for _ in range(i):
        c = synthesize(unitary_of(compose(c, c)))
    return unitary_of(c)


def iqft_circuit(k: int) -> Circuit:
    """Inverse QFT without SWAPs: ``k`` Hadamards and ``k(k-1)/2`` CPHASEs.

    Its matrix is the inverse DFT followed by a bit reversal of the output.
    """
    if k < 1:
        raise QpeError("k must be positive")
    gates = []
    for j in range(k):
        for l in range(j):
            gates.append(Gate("CPHASE", (l, j), -math.pi / 2 ** (j - l)))
        gates.append(Gate("H", (j,)))
    return Circuit(k, tuple(gates))


def _completion(vec: np.ndarray) -> np.ndarray:
    """A unitary whose first column is ``vec``."""
    dim = vec.size
    q, r = np.linalg.qr(np.column_stack([vec, np.eye(dim, dtype=complex)]), mode="complete")
    q = q[:, :dim]
    # column 0 equals vec / r[0, 0] with |r[0, 0]| = 1
    q[:, 0] *= r[0, 0]
    return q


def state_preparation(spec: QpeSpec) -> Circuit:
    """Circuit on the system register mapping ``|0...0>`` to the initial state."""
    ns = spec.n_system
    if isinstance(spec.initial_state, str):
        gates = [Gate("RX", (q,), math.pi) for q, b in enumerate(spec.initial_state) if b == "1"]
        # RX(pi) = -i X
        return Circuit(ns, tuple(gates), len(gates) * math.pi / 2)
    unitary = _completion(spec.state_vector)
    return synth_1q(unitary) if ns == 1 else synth_2q(unitary)


def controlled_power_circuit(u: np.ndarray, i: int) -> Circuit:
    """Synthesised ``diag(I, u**(2**i))`` with the control as qubit 0."""
    block = controlled_block(power_phases(u, i))
    return synthesize(block)


def build_qpe(spec: QpeSpec) -> Circuit:
    k, ns = spec.k, spec.n_system
    if not 1 <= ns <= MAX_SYSTEM_QUBITS:
        raise QpeError(f"system register must have 1-{MAX_SYSTEM_QUBITS} qubits, got {ns}")
    n = k + ns
    system = list(range(k, n))
    u = trotterized_unitary(spec.evolution)

    gates = [Gate("H", (q,)) for q in range(k)]
    prep = state_preparation(spec)
    gates += [g.remapped(system) for g in prep.gates]
    phase = prep.global_phase
    for i in range(k):
        block = controlled_power_circuit(u, i)
        gates += [g.remapped([k - 1 - i] + system) for g in block.gates]
        phase += block.global_phase
    gates += list(iqft_circuit(k).gates)
    gates += [Gate("MEASURE", (q,)) for q in range(k)]
    return Circuit(n, tuple(gates), phase, {"readout": (0, k), "system": (k, n)})
