"""Second-quantised Hamiltonians and the Jordan-Wigner mapping.

The Hamiltonian of an ``IntegralTable`` is

    H = core_energy + sum_pq h_pq a+_p a_q + sum_pqrs h_pqrs a+_p a+_q a_r a_s

with no 1/2 prefactor on the two-body sum.  Spin-orbital ``p`` maps to
qubit ``p`` and an occupied orbital is the qubit state ``|1>``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

from .pauli import HamiltonianError, PauliString, PauliSum

SYMMETRY_ATOL = 1e-12
COEFF_CUTOFF = 1e-14

# index permutations of h_pqrs that leave real spin-orbital integrals unchanged
_EIGHTFOLD = (
    (0, 1, 2, 3),
    (1, 0, 3, 2),
    (3, 2, 1, 0),
    (2, 3, 0, 1),
    (3, 1, 2, 0),
    (2, 0, 3, 1),
    (0, 2, 1, 3),
    (1, 3, 0, 2),
)


@dataclass(frozen=True, eq=False)
class IntegralTable:
    n_orbitals: int
    one_body: np.ndarray
    two_body: np.ndarray
    core_energy: float = 0.0

    def __post_init__(self) -> None:
        n = int(self.n_orbitals)
        h1 = np.array(self.one_body, dtype=float)
        h2 = np.array(self.two_body, dtype=float)
        if h2.size == 0:
            h2 = np.zeros((n,) * 4)
        if h1.shape != (n, n):
            raise HamiltonianError(f"one_body has shape {h1.shape}, expected {(n, n)}")
        if h2.shape != (n,) * 4:
            raise HamiltonianError(f"two_body has shape {h2.shape}, expected {(n,) * 4}")
        if not np.allclose(h1, h1.T, atol=SYMMETRY_ATOL, rtol=0):
            raise HamiltonianError("one_body must be symmetric")
        for perm in _EIGHTFOLD[1:]:
            if not np.allclose(h2, h2.transpose(perm), atol=SYMMETRY_ATOL, rtol=0):
                raise HamiltonianError(f"two_body breaks index symmetry {perm}")
        h1.setflags(write=False)
        h2.setflags(write=False)
        object.__setattr__(self, "n_orbitals", n)
        object.__setattr__(self, "one_body", h1)
        object.__setattr__(self, "two_body", h2)
        object.__setattr__(self, "core_energy", float(self.core_energy))

    @classmethod
    def from_json(cls, text: str) -> "IntegralTable":
        data = json.loads(text)
        try:
            return cls(
                data["n_orbitals"],
                data["one_body"],
                data.get("two_body", []),
                data.get("core_energy", 0.0),
            )
        except KeyError as exc:
            raise HamiltonianError(f"integral file missing {exc}") from None

    def to_json(self) -> str:
        return json.dumps(
            {
                "n_orbitals": self.n_orbitals,
                "core_energy": self.core_energy,
                "one_body": self.one_body.tolist(),
                "two_body": self.two_body.tolist(),
            }
        )


def symmetrize_two_body(t: np.ndarray) -> np.ndarray:
    """Average ``t`` over the eight index permutations."""
    t = np.asarray(t, dtype=float)
    return sum(t.transpose(p) for p in _EIGHTFOLD) / len(_EIGHTFOLD)


# A qubit operator under construction: PauliString ops -> complex coefficient.
_Op = dict


def _ladder(p: int, n: int, create: bool) -> _Op:
    z = "Z" * p
    rest = "I" * (n - p - 1)
    sign = -0.5j if create else 0.5j
    return {z + "X" + rest: 0.5, z + "Y" + rest: sign}


def _product(a: _Op, b: _Op) -> _Op:
    out: _Op = {}
    for pa, ca in a.items():
        for pb, cb in b.items():
            phase, p = PauliString(pa).multiply(PauliString(pb))
            out[p.ops] = out.get(p.ops, 0) + ca * cb * phase
    return out


def jordan_wigner(integrals: IntegralTable) -> PauliSum:
    n = integrals.n_orbitals
    create = [_ladder(p, n, True) for p in range(n)]
    annihilate = [_ladder(p, n, False) for p in range(n)]
    total: _Op = {}

    def accumulate(op: _Op, coeff: float) -> None:
        for p, c in op.items():
            total[p] = total.get(p, 0) + coeff * c

    for p, q in itertools.product(range(n), repeat=2):
        h = integrals.one_body[p, q]
        if h != 0.0:
            accumulate(_product(create[p], annihilate[q]), h)
    for p, q, r, s in itertools.product(range(n), repeat=4):
        h = integrals.two_body[p, q, r, s]
        if h != 0.0 and p != q and r != s:
            op = _product(_product(create[p], create[q]), _product(annihilate[r], annihilate[s]))
            accumulate(op, h)

    identity = "I" * n
    offset = integrals.core_energy + total.pop(identity, 0).real
    terms = []
    for p in sorted(total):
        c = total[p]
        if abs(c.imag) > 1e-10:
            raise HamiltonianError(f"non-Hermitian result on {p}: {c}")
        if abs(c.real) > COEFF_CUTOFF:
            terms.append((PauliString(p), float(c.real)))
    return PauliSum(n, tuple(terms), float(offset))
