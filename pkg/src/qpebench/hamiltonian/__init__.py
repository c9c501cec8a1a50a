"""Pauli-sum Hamiltonians, Jordan-Wigner mapping and Z2 tapering."""

from .fermion import IntegralTable, jordan_wigner, symmetrize_two_body
from .pauli import (
    PRESETS,
    HamiltonianError,
    PauliString,
    PauliSum,
    diagonal_energies,
    exact_eigs,
    load_pauli_sum,
    lowest_basis_state,
    parse_pauli_sum,
    preset_h2,
    random_pauli_sum,
    to_matrix,
)
from .tapering import (
    SymmetrySector,
    all_sectors,
    find_z2_symmetries,
    sector_for_state,
    z2_taper,
)

__all__ = [
    "PRESETS",
    "HamiltonianError",
    "IntegralTable",
    "PauliString",
    "PauliSum",
    "SymmetrySector",
    "all_sectors",
    "diagonal_energies",
    "exact_eigs",
    "find_z2_symmetries",
    "jordan_wigner",
    "load_pauli_sum",
    "lowest_basis_state",
    "parse_pauli_sum",
    "preset_h2",
    "random_pauli_sum",
    "sector_for_state",
    "symmetrize_two_body",
    "to_matrix",
    "z2_taper",
]
