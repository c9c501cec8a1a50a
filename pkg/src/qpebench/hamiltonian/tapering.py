"""Z2 symmetry detection and qubit tapering.

Pauli strings are handled as binary vectors ``[z | x]`` over GF(2); two
strings commute iff their symplectic product ``z1.x2 + x1.z2`` vanishes.
Z columns come first so that row reduction prefers Z-type generators,
which are diagonal and whose sector can be read off a basis state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .pauli import HamiltonianError, PauliString, PauliSum

MAX_SYMMETRY_QUBITS = 8


def _vector(p: PauliString) -> np.ndarray:
    x, z = p.symplectic()
    return np.concatenate([z, x])


def _string(v: np.ndarray) -> PauliString:
    n = len(v) // 2
    return PauliString.from_symplectic(v[n:], v[:n])


def _symplectic_product(a: np.ndarray, b: np.ndarray) -> int:
    n = len(a) // 2
    return int(a[:n] @ b[n:] + a[n:] @ b[:n]) & 1


def rref_gf2(rows: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2) with lowest-column pivots."""
    m = np.array(rows, dtype=np.uint8) & 1
    pivots: list[int] = []
    r = 0
    for col in range(m.shape[1]):
        hit = np.nonzero(m[r:, col])[0]
        if hit.size == 0:
            continue
        p = r + hit[0]
        m[[r, p]] = m[[p, r]]
        for i in range(m.shape[0]):
            if i != r and m[i, col]:
                m[i] ^= m[r]
        pivots.append(col)
        r += 1
        if r == m.shape[0]:
            break
    return m[:r], pivots


def nullspace_gf2(a: np.ndarray, n_cols: int) -> np.ndarray:
    """Basis (rows) of ``{v : a v = 0}`` over GF(2), in reduced form."""
    if len(a) == 0:
        return np.eye(n_cols, dtype=np.uint8)
    red, pivots = rref_gf2(a)
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(n_cols, dtype=np.uint8)
        v[f] = 1
        for row, pc in zip(red, pivots):
            v[pc] = row[f]
        basis.append(v)
    if not basis:
        return np.zeros((0, n_cols), dtype=np.uint8)
    return rref_gf2(np.array(basis))[0]


def find_z2_symmetries(h: PauliSum) -> list[PauliString]:
    """Independent, mutually commuting Pauli strings commuting with every term.

    The commutant of the terms is computed as a GF(2) kernel; a maximal
    isotropic (pairwise commuting) subspace of it is then extracted by
    symplectic Gram-Schmidt, keeping the first vector of every
    anticommuting pair.
    """
    n = h.n_qubits
    if n > MAX_SYMMETRY_QUBITS:
        raise HamiltonianError(f"symmetry search limited to {MAX_SYMMETRY_QUBITS} qubits")
    rows = []
    for p, _ in h.terms:
        v = _vector(p)
        # dot with [z|x] of the unknown gives the symplectic product
        rows.append(np.concatenate([v[n:], v[:n]]))
    kernel = [row.copy() for row in nullspace_gf2(np.array(rows, dtype=np.uint8), 2 * n)]

    chosen = []
    while kernel:
        u = kernel.pop(0)
        partner = next((i for i, w in enumerate(kernel) if _symplectic_product(u, w)), None)
        chosen.append(u)
        if partner is None:
            continue
        v = kernel.pop(partner)
        for i, w in enumerate(kernel):
            kernel[i] = w ^ (_symplectic_product(w, v) * u) ^ (_symplectic_product(w, u) * v)
    if not chosen:
        return []
    reduced, _ = rref_gf2(np.array(chosen))
    return [_string(v) for v in reduced]


@dataclass(frozen=True)
class SymmetrySector:
    generators: tuple[PauliString, ...]
    eigenvalues: tuple[int, ...]

    def __post_init__(self) -> None:
        gens = tuple(p if isinstance(p, PauliString) else PauliString(p) for p in self.generators)
        eigs = tuple(int(e) for e in self.eigenvalues)
        if len(gens) != len(eigs):
            raise HamiltonianError("one eigenvalue is needed per generator")
        if any(e not in (1, -1) for e in eigs):
            raise HamiltonianError("sector eigenvalues must be +1 or -1")
        for i, a in enumerate(gens):
            for b in gens[i + 1 :]:
                if not a.commutes(b):
                    raise HamiltonianError(f"generators {a} and {b} do not commute")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "eigenvalues", eigs)


def sector_for_state(generators: Sequence[PauliString], bitstring: str) -> SymmetrySector:
    """Sector containing the basis state ``bitstring`` (qubit 0 leftmost).

    Only diagonal (Z-type) generators have a definite value on a basis state.
    """
    eigs = []
    for g in generators:
        if not g.is_diagonal:
            raise HamiltonianError(f"generator {g} is not diagonal; give the sector explicitly")
        if len(bitstring) != g.n_qubits:
            raise HamiltonianError("bitstring length differs from generator length")
        parity = sum(int(b) for b, c in zip(bitstring, g.ops) if c == "Z")
        eigs.append(-1 if parity % 2 else 1)
    return SymmetrySector(tuple(generators), tuple(eigs))


def all_sectors(generators: Sequence[PauliString]) -> list[SymmetrySector]:
    r = len(generators)
    return [
        SymmetrySector(tuple(generators), tuple(-1 if (m >> i) & 1 else 1 for i in range(r)))
        for m in range(2**r)
    ]


def _pivot_paulis(gens: list[np.ndarray], n: int) -> tuple[list[np.ndarray], list[tuple[int, str]]]:
    """Rewrite ``gens`` so generator ``i`` alone anticommutes with a
    single-qubit Pauli on its own qubit ``q_i``.

    Returns the new basis and ``(q_i, pauli)`` per generator.  Pivots are
    searched depth-first, lowest column first.
    """

    def search(rows: list[np.ndarray], i: int, used: frozenset[int]):
        if i == len(rows):
            return rows, []
        for col in np.nonzero(rows[i])[0]:
            q = int(col) % n
            if q in used:
                continue
            new = [r.copy() for r in rows]
            for j in range(len(new)):
                if j != i and new[j][col]:
                    new[j] ^= new[i]
            found = search(new, i + 1, used | {q})
            if found is not None:
                # a z pivot needs an X partner, an x pivot a Z partner
                pauli = "X" if col < n else "Z"
                return found[0], [(q, pauli)] + found[1]
        return None

    found = search([g.copy() for g in gens], 0, frozenset())
    if found is None:
        raise HamiltonianError("no single-qubit pivots for these generators")
    return found


def z2_taper(h: PauliSum, sector: SymmetrySector) -> PauliSum:
    """Remove one qubit per generator, fixing each generator to its eigenvalue.

    With ``sigma_i`` a single-qubit Pauli that anticommutes only with
    ``tau_i``, the Clifford ``(sigma_i + tau_i)/sqrt(2)`` maps ``tau_i`` to
    ``sigma_i``; afterwards qubit ``q_i`` carries only ``I`` or ``sigma_i``,
    which is replaced by the eigenvalue.
    """
    gens = list(sector.generators)
    if not gens:
        return h
    n = h.n_qubits
    for g in gens:
        if g.n_qubits != n:
            raise HamiltonianError(f"generator {g} has the wrong length")
        for p, _ in h.terms:
            if not g.commutes(p):
                raise HamiltonianError(f"generator {g} does not commute with term {p}")
    vecs = [_vector(g) for g in gens]
    if len(rref_gf2(np.array(vecs))[0]) != len(vecs):
        raise HamiltonianError("generators are not independent")

    # row operations multiply generators together, and eigenvalues with them
    new_vecs, pivots = _pivot_paulis(vecs, n)
    taus, eigs = [], []
    for v in new_vecs:
        tau, eig = _combine(vecs, sector.eigenvalues, v)
        taus.append(tau)
        eigs.append(eig)

    terms = [(p, complex(c)) for p, c in h.terms]
    for tau, (q, s) in zip(taus, pivots):
        sigma = PauliString("I" * q + s + "I" * (n - q - 1))
        out = []
        for p, c in terms:
            if p.commutes(sigma):
                out.append((p, c))
            else:
                # U P U = P tau sigma when P commutes with tau but not sigma
                ph1, pt = p.multiply(tau)
                ph2, pts = pt.multiply(sigma)
                out.append((pts, c * ph1 * ph2))
        terms = out

    drop = {q: (s, e) for (q, s), e in zip(pivots, eigs)}
    keep = [q for q in range(n) if q not in drop]
    reduced: list[tuple[PauliString, float]] = []
    offset = h.offset
    for p, c in terms:
        for q, (s, e) in drop.items():
            if p.ops[q] == s:
                c *= e
            elif p.ops[q] != "I":
                raise HamiltonianError(f"term {p} not reduced on qubit {q}")
        if abs(c.imag) > 1e-12:
            raise HamiltonianError(f"tapering produced a non-real coefficient on {p}")
        ops = "".join(p.ops[q] for q in keep)
        if not ops:
            offset += c.real
        else:
            reduced.append((PauliString(ops), c.real))
    return PauliSum(len(keep), tuple(reduced), offset)


def _combine(vecs, eigenvalues, target) -> tuple[PauliString, int]:
    """Express ``target`` as a product of the original generators.

    Returns the product string and its eigenvalue in the sector.
    """
    basis = np.array(vecs, dtype=np.uint8)
    # solve coefficients c with c @ basis == target over GF(2)
    aug = np.concatenate([basis.T, target[:, None]], axis=1)
    red, pivots = rref_gf2(aug)
    k = len(vecs)
    if k in pivots:
        raise HamiltonianError("pivot row outside the generator span")
    coeffs = np.zeros(k, dtype=np.uint8)
    for row, pc in zip(red, pivots):
        coeffs[pc] = row[k]
    phase: complex = 1
    prod = PauliString.identity(len(target) // 2)
    eig = 1
    for c, v, e in zip(coeffs, vecs, eigenvalues):
        if c:
            ph, prod = prod.multiply(_string(v))
            phase *= ph
            eig *= e
    # commuting generators multiply to +-prod
    return prod, eig * int(round(phase.real))
