"""Gate-level circuit representation, scheduling and resource accounting.

Qubit ordering is big-endian throughout: qubit 0 is the most significant
index of every state vector and unitary matrix, so the matrix of a gate on
qubits ``(a, b)`` is ``kron(op_a, op_b)`` when ``a`` precedes ``b``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

ONE_QUBIT_KINDS = frozenset({"RX", "RY", "RZ", "H"})
TWO_QUBIT_KINDS = frozenset({"CX", "CPHASE"})
ROTATION_KINDS = frozenset({"RX", "RY", "RZ", "CPHASE"})
GATE_KINDS = ONE_QUBIT_KINDS | TWO_QUBIT_KINDS | {"MEASURE"}

MAX_UNITARY_QUBITS = 12

_SQRT1_2 = 1.0 / math.sqrt(2.0)
_H = np.array([[_SQRT1_2, _SQRT1_2], [_SQRT1_2, -_SQRT1_2]], dtype=complex)
_CX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


class CircuitError(ValueError):
    """Raised for malformed gates, circuits or incompatible compositions."""


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in GATE_KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        qubits = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qubits)
        arity = 2 if self.kind in TWO_QUBIT_KINDS else 1
        if len(qubits) != arity:
            raise CircuitError(f"{self.kind} acts on {arity} qubit(s), got {qubits}")
        if arity == 2 and qubits[0] == qubits[1]:
            raise CircuitError(f"{self.kind} needs two distinct qubits, got {qubits}")
        if any(q < 0 for q in qubits):
            raise CircuitError(f"negative qubit index in {qubits}")
        if self.kind in ROTATION_KINDS:
            if self.angle is None or not math.isfinite(self.angle):
                raise CircuitError(f"{self.kind} requires a finite angle")
            object.__setattr__(self, "angle", float(self.angle))
        elif self.angle is not None:
            raise CircuitError(f"{self.kind} takes no angle")

    @property
    def is_two_qubit(self) -> bool:
        return self.kind in TWO_QUBIT_KINDS

    def matrix(self) -> np.ndarray:
        """Dense matrix of the gate on its own qubits (in listed order)."""
        return gate_matrix(self.kind, self.angle)

    def inverse(self) -> "Gate":
        if self.kind == "MEASURE":
            raise CircuitError("MEASURE has no inverse")
        if self.kind in ROTATION_KINDS:
            return Gate(self.kind, self.qubits, -self.angle)
        return self

    def shifted(self, offset: int) -> "Gate":
        return Gate(self.kind, tuple(q + offset for q in self.qubits), self.angle)

    def remapped(self, mapping: Sequence[int]) -> "Gate":
        return Gate(self.kind, tuple(mapping[q] for q in self.qubits), self.angle)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "qubits": list(self.qubits), "angle": self.angle}


def gate_matrix(kind: str, angle: float | None = None) -> np.ndarray:
    if kind == "H":
        return _H.copy()
    if kind == "CX":
        return _CX.copy()
    if kind == "RX":
        c, s = math.cos(angle / 2), math.sin(angle / 2)
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if kind == "RY":
        c, s = math.cos(angle / 2), math.sin(angle / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "RZ":
        return np.diag([np.exp(-0.5j * angle), np.exp(0.5j * angle)])
    if kind == "CPHASE":
        return np.diag([1, 1, 1, np.exp(1j * angle)]).astype(complex)
    raise CircuitError(f"no matrix for {kind}")


@dataclass(frozen=True)
class ResourceReport:
    total_gates: int
    two_qubit_gates: int
    depth: int

    def to_dict(self) -> dict:
        return {
            "total_gates": self.total_gates,
            "two_qubit_gates": self.two_qubit_gates,
            "depth": self.depth,
        }


@dataclass(frozen=True)
class Circuit:
    """An ordered gate list with an explicit global phase.

    ``registers`` maps register names (``"readout"``, ``"system"``) to
    half-open index ranges.
    """

    n_qubits: int
    gates: tuple[Gate, ...] = ()
    global_phase: float = 0.0
    registers: Mapping[str, tuple[int, int]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise CircuitError("a circuit needs at least one qubit")
        gates = tuple(self.gates)
        object.__setattr__(self, "gates", gates)
        object.__setattr__(self, "global_phase", float(self.global_phase))
        regs = {str(k): (int(v[0]), int(v[1])) for k, v in dict(self.registers).items()}
        for name, (lo, hi) in regs.items():
            if not 0 <= lo <= hi <= self.n_qubits:
                raise CircuitError(f"register {name!r} range {(lo, hi)} out of bounds")
        object.__setattr__(self, "registers", regs)
        measured: set[int] = set()
        for g in gates:
            if any(q >= self.n_qubits for q in g.qubits):
                raise CircuitError(f"{g} outside {self.n_qubits}-qubit circuit")
            if measured.intersection(g.qubits):
                raise CircuitError(f"{g} acts on an already measured qubit")
            if g.kind == "MEASURE":
                measured.add(g.qubits[0])

    def __len__(self) -> int:
        return len(self.gates)

    @property
    def has_measurements(self) -> bool:
        return any(g.kind == "MEASURE" for g in self.gates)

    @property
    def measured_qubits(self) -> list[int]:
        return [g.qubits[0] for g in self.gates if g.kind == "MEASURE"]

    def register(self, name: str) -> range:
        lo, hi = self.registers[name]
        return range(lo, hi)

    def with_gates(self, gates: Iterable[Gate], phase: float = 0.0) -> "Circuit":
        """Return a copy with ``gates`` appended and ``phase`` added."""
        return Circuit(
            self.n_qubits,
            self.gates + tuple(gates),
            self.global_phase + phase,
            self.registers,
        )

    def embedded(self, n_qubits: int, mapping: Sequence[int]) -> "Circuit":
        """Relabel qubit ``q`` as ``mapping[q]`` inside a wider circuit."""
        return Circuit(
            n_qubits, tuple(g.remapped(mapping) for g in self.gates), self.global_phase
        )

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "global_phase": self.global_phase,
            "registers": {k: list(v) for k, v in self.registers.items()},
            "gates": [g.to_dict() for g in self.gates],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        """Parse either the full object form or a bare gate list."""
        data = json.loads(text)
        if isinstance(data, list):
            gates = [Gate(d["kind"], tuple(d["qubits"]), d.get("angle")) for d in data]
            n = 1 + max((q for g in gates for q in g.qubits), default=0)
            return cls(n, tuple(gates))
        gates = [Gate(d["kind"], tuple(d["qubits"]), d.get("angle")) for d in data["gates"]]
        return cls(
            int(data["n_qubits"]),
            tuple(gates),
            float(data.get("global_phase", 0.0)),
            {k: tuple(v) for k, v in data.get("registers", {}).items()},
        )


def compose(a: Circuit, b: Circuit) -> Circuit:
    """Run ``a`` then ``b``; global phases add and register maps merge."""
    if a.n_qubits != b.n_qubits:
        raise CircuitError(f"qubit count mismatch: {a.n_qubits} vs {b.n_qubits}")
    registers = dict(a.registers)
    for name, rng in b.registers.items():
        if name in registers and registers[name] != rng:
            raise CircuitError(f"register {name!r} differs: {registers[name]} vs {rng}")
        registers[name] = rng
    return Circuit(a.n_qubits, a.gates + b.gates, a.global_phase + b.global_phase, registers)


def dagger(c: Circuit) -> Circuit:
    if c.has_measurements:
        raise CircuitError("cannot invert a circuit containing measurements")
    return Circuit(
        c.n_qubits,
        tuple(g.inverse() for g in reversed(c.gates)),
        -c.global_phase,
        c.registers,
    )


def schedule(gates: Sequence[Gate], n_qubits: int) -> list[int]:
    """Greedy as-soon-as-possible layer index for each gate."""
    frontier = [0] * n_qubits
    layers = []
    for g in gates:
        layer = max(frontier[q] for q in g.qubits)
        for q in g.qubits:
            frontier[q] = layer + 1
        layers.append(layer)
    return layers


def resource_report(c: Circuit) -> ResourceReport:
    layers = schedule(c.gates, c.n_qubits)
    return ResourceReport(
        total_gates=len(c.gates),
        two_qubit_gates=sum(g.is_two_qubit for g in c.gates),
        depth=(max(layers) + 1) if layers else 0,
    )


def apply_matrix(tensor: np.ndarray, mat: np.ndarray, qubits: Sequence[int]) -> np.ndarray:
    """Apply ``mat`` to ``qubits`` of a ``(2,)*n + batch`` tensor."""
    k = len(qubits)
    moved = np.moveaxis(tensor, list(qubits), list(range(k)))
    shape = moved.shape
    out = (mat @ moved.reshape(2**k, -1)).reshape(shape)
    return np.moveaxis(out, list(range(k)), list(qubits))


def unitary_of(c: Circuit) -> np.ndarray:
    """Dense unitary of a measurement-free circuit, global phase included."""
    if c.has_measurements:
        raise CircuitError("unitary_of requires a circuit without MEASURE")
    if c.n_qubits > MAX_UNITARY_QUBITS:
        raise CircuitError(f"unitary_of limited to {MAX_UNITARY_QUBITS} qubits")
    dim = 2**c.n_qubits
    tensor = np.eye(dim, dtype=complex).reshape((2,) * c.n_qubits + (dim,))
    for g in c.gates:
        tensor = apply_matrix(tensor, g.matrix(), g.qubits)
    return tensor.reshape(dim, dim) * np.exp(1j * c.global_phase)
