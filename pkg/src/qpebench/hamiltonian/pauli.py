"""Pauli strings, weighted Pauli sums and their JSON file format.

A Pauli string is written left to right from qubit 0, so ``"XZ"`` is
``X`` on qubit 0 tensored with ``Z`` on qubit 1.  Coefficients are in
hartree.  Identity strings are folded into ``PauliSum.offset``.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

MAX_DENSE_QUBITS = 12

# (a, b) -> (phase, a*b) for single-qubit Paulis
_PRODUCT = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("X", "X"): (1, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
    ("Y", "I"): (1, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1, "I"), ("Y", "Z"): (1j, "X"),
    ("Z", "I"): (1, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1, "I"),
}  # fmt: skip

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class HamiltonianError(ValueError):
    """Malformed Pauli strings, sums or Hamiltonian files."""


@dataclass(frozen=True, order=True)
class PauliString:
    ops: str

    def __post_init__(self) -> None:
        ops = str(self.ops).upper()
        if not ops:
            raise HamiltonianError("a Pauli string needs at least one qubit")
        bad = set(ops) - set("IXYZ")
        if bad:
            raise HamiltonianError(f"invalid Pauli symbol(s) {sorted(bad)} in {self.ops!r}")
        object.__setattr__(self, "ops", ops)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls("I" * n)

    @classmethod
    def from_symplectic(cls, x: Iterable[int], z: Iterable[int]) -> "PauliString":
        table = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
        return cls("".join(table[int(a) & 1, int(b) & 1] for a, b in zip(x, z)))

    def __len__(self) -> int:
        return len(self.ops)

    def __str__(self) -> str:
        return self.ops

    @property
    def n_qubits(self) -> int:
        return len(self.ops)

    @property
    def is_identity(self) -> bool:
        return set(self.ops) == {"I"}

    @property
    def is_diagonal(self) -> bool:
        return set(self.ops) <= {"I", "Z"}

    def symplectic(self) -> tuple[np.ndarray, np.ndarray]:
        """``(x, z)`` bit vectors; Y has both bits set."""
        x = np.array([c in "XY" for c in self.ops], dtype=np.uint8)
        z = np.array([c in "ZY" for c in self.ops], dtype=np.uint8)
        return x, z

    def commutes(self, other: "PauliString") -> bool:
        self._check_len(other)
        clashes = sum(a != "I" and b != "I" and a != b for a, b in zip(self.ops, other.ops))
        return clashes % 2 == 0

    def multiply(self, other: "PauliString") -> tuple[complex, "PauliString"]:
        """``self @ other`` as ``(phase, string)``."""
        self._check_len(other)
        phase: complex = 1
        out = []
        for a, b in zip(self.ops, other.ops):
            p, c = _PRODUCT[a, b]
            phase *= p
            out.append(c)
        return phase, PauliString("".join(out))

    def matrix(self) -> np.ndarray:
        m = np.ones((1, 1), dtype=complex)
        for c in self.ops:
            m = np.kron(m, _SINGLE[c])
        return m

    def _check_len(self, other: "PauliString") -> None:
        if len(other) != len(self):
            raise HamiltonianError(f"length mismatch: {self.ops} vs {other.ops}")


def _as_pauli(p) -> PauliString:
    return p if isinstance(p, PauliString) else PauliString(p)


@dataclass(frozen=True)
class PauliSum:
    """``offset * I + sum_j coeff_j P_j`` with real coefficients.

    ``terms`` keeps insertion order, which fixes the Trotter product order.
    Repeated strings are merged at their first position.
    """

    n_qubits: int
    terms: tuple[tuple[PauliString, float], ...] = ()
    offset: float = 0.0

    def __post_init__(self) -> None:
        # zero qubits is allowed: a fully tapered operator is a scalar
        if int(self.n_qubits) < 0:
            raise HamiltonianError("n_qubits must be non-negative")
        object.__setattr__(self, "n_qubits", int(self.n_qubits))
        merged: dict[PauliString, float] = {}
        offset = _real(self.offset, "offset")
        for p, c in self.terms:
            p = _as_pauli(p)
            c = _real(c, p.ops)
            if p.n_qubits != self.n_qubits:
                raise HamiltonianError(
                    f"string {p.ops} has {p.n_qubits} qubits, expected {self.n_qubits}"
                )
            if p.is_identity:
                offset += c
            elif p in merged:
                merged[p] += c
            else:
                merged[p] = c
        object.__setattr__(self, "terms", tuple(merged.items()))
        object.__setattr__(self, "offset", offset)

    @classmethod
    def from_dict(cls, n_qubits: int, coeffs: Mapping, offset: float = 0.0) -> "PauliSum":
        return cls(n_qubits, tuple(coeffs.items()), offset)

    def as_dict(self) -> dict[str, float]:
        return {p.ops: c for p, c in self.terms}

    def __len__(self) -> int:
        return len(self.terms)

    def coefficient(self, pauli) -> float:
        return self.as_dict().get(_as_pauli(pauli).ops, 0.0)

    def reordered(self, order: Iterable) -> "PauliSum":
        """Same operator with terms in ``order`` (strings or indices)."""
        lookup = self.as_dict()
        picked = []
        for key in order:
            ops = self.terms[key][0].ops if isinstance(key, int) else _as_pauli(key).ops
            if ops not in lookup:
                raise HamiltonianError(f"term {ops} not in Hamiltonian")
            picked.append(ops)
        if sorted(picked) != sorted(lookup):
            raise HamiltonianError("term order must list every term exactly once")
        return PauliSum(self.n_qubits, tuple((p, lookup[p]) for p in picked), self.offset)

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "offset": self.offset,
            "terms": [{"pauli": p.ops, "coeff": c} for p, c in self.terms],
        }

    def to_json(self, **kwargs) -> str:
        # json writes floats with repr, which round-trips exactly
        return json.dumps(self.to_dict(), **kwargs)


def _real(value, what: str) -> float:
    if isinstance(value, (bool, str)):
        raise HamiltonianError(f"coefficient of {what} must be a number")
    if isinstance(value, (list, tuple)) and len(value) == 2:
        re, im = (_real(v, what) for v in value)
        if im != 0.0:
            raise HamiltonianError(f"non-real coefficient for {what}: {re}+{im}j")
        return re
    if isinstance(value, complex):
        if value.imag != 0.0:
            raise HamiltonianError(f"non-real coefficient for {what}: {value}")
        value = value.real
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise HamiltonianError(f"coefficient of {what} is not a number: {value!r}") from None
    if not math.isfinite(out):
        raise HamiltonianError(f"coefficient of {what} is not finite")
    return out


def parse_pauli_sum(text: str) -> PauliSum:
    """Parse the JSON Hamiltonian file format.

    ``{"n_qubits": n, "offset": c, "terms": [{"pauli": "XZ", "coeff": 0.1}, ...]}``
    Coefficients may also be ``[re, im]`` pairs, provided ``im == 0``.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise HamiltonianError(f"invalid JSON: {exc}") from None
    if not isinstance(data, dict) or "n_qubits" not in data:
        raise HamiltonianError("Hamiltonian file must be an object with n_qubits")
    n = data["n_qubits"]
    if isinstance(n, bool) or not isinstance(n, int):
        raise HamiltonianError("n_qubits must be an integer")
    terms = data.get("terms", [])
    if not isinstance(terms, list):
        raise HamiltonianError("terms must be a list")
    parsed = []
    for t in terms:
        if not isinstance(t, dict) or "pauli" not in t or "coeff" not in t:
            raise HamiltonianError(f"malformed term {t!r}")
        if not isinstance(t["pauli"], str):
            raise HamiltonianError(f"pauli must be a string, got {t['pauli']!r}")
        parsed.append((PauliString(t["pauli"]), t["coeff"]))
    return PauliSum(n, tuple(parsed), data.get("offset", 0.0))


def load_pauli_sum(path) -> PauliSum:
    with open(path, encoding="utf-8") as fh:
        return parse_pauli_sum(fh.read())


H2_X = 0.16814576933537334
H2_Z = 1.1973374204075313


def preset_h2() -> PauliSum:
    """Tapered one-qubit H2 Hamiltonian (identity part removed)."""
    return PauliSum(1, ((PauliString("X"), H2_X), (PauliString("Z"), H2_Z)), 0.0)


PRESETS = {"h2": preset_h2}


def random_pauli_sum(n_qubits: int, rng: np.random.Generator, width: float = 1.5) -> PauliSum:
    """Gaussian coefficients on every non-identity string, rescaled so the
    spectrum spans exactly ``width``.  Used for HeH+-like two-qubit tests."""
    if not 1 <= n_qubits <= MAX_DENSE_QUBITS or not width > 0:
        raise HamiltonianError("need 1 <= n_qubits <= 12 and width > 0")
    strings = ["".join(ops) for ops in itertools.product("IXYZ", repeat=n_qubits)][1:]
    coeffs = rng.normal(size=len(strings))
    h = PauliSum.from_dict(n_qubits, dict(zip(strings, coeffs)))
    eigs = exact_eigs(h)
    scale = width / (eigs[-1] - eigs[0])
    return PauliSum(n_qubits, tuple((q, float(c * scale)) for q, c in h.terms), 0.0)


def pauli_action(p: PauliString) -> tuple[int, np.ndarray]:
    """Flip mask and per-basis-state phase of ``p``: ``P|i> = phase[i] |i ^ mask>``."""
    n = p.n_qubits
    idx = np.arange(2**n)
    flip = 0
    phase = np.ones(2**n, dtype=complex)
    for q, c in enumerate(p.ops):
        bit = n - 1 - q
        if c in "XY":
            flip |= 1 << bit
        if c in "ZY":
            phase *= 1 - 2 * ((idx >> bit) & 1)
        if c == "Y":
            phase *= 1j
    return flip, phase


def to_matrix(h: PauliSum) -> np.ndarray:
    if h.n_qubits > MAX_DENSE_QUBITS:
        raise HamiltonianError(f"dense matrices limited to {MAX_DENSE_QUBITS} qubits")
    dim = 2**h.n_qubits
    m = np.zeros((dim, dim), dtype=complex)
    cols = np.arange(dim)
    m[cols, cols] = h.offset
    for p, c in h.terms:
        flip, phase = pauli_action(p)
        m[cols ^ flip, cols] += c * phase
    return m


def exact_eigs(h: PauliSum) -> np.ndarray:
    """Ascending eigenvalues, offset included."""
    return np.linalg.eigvalsh(to_matrix(h))


def diagonal_energies(h: PauliSum) -> np.ndarray:
    """``<b|H|b>`` for every computational basis state ``b``."""
    dim = 2**h.n_qubits
    diag = np.full(dim, h.offset, dtype=float)
    for p, c in h.terms:
        if p.is_diagonal:
            _, phase = pauli_action(p)
            diag += c * phase.real
    return diag


def lowest_basis_state(h: PauliSum) -> str:
    """Basis state of lowest diagonal energy (a Hartree-Fock-like reference)."""
    idx = int(np.argmin(diagonal_energies(h)))
    return format(idx, f"0{h.n_qubits}b")
