"""Phase and energy estimates from counts, precision metrics and the
closed-form noiseless outcome distribution.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .hamiltonian import exact_eigs
from .phases import (
    decode_index,
    decode_phase,
    encode_index,
    phase_bound,
    phase_to_energy,
    theoretical_bound,
)
from .qpe import QpeSpec, eigenphase_table, trotterized_unitary, unitary_eigensystem
from .simulator import Counts

MAX_ANALYTIC_K = 24

CSV_COLUMNS = (
    "k",
    "n_trotter",
    "noise_scale",
    "p2_scale",
    "mem_scale",
    "seed",
    "shots",
    "winner",
    "phase",
    "energy",
    "e_ref_trotter",
    "e_ref_fci",
    "p_max",
    "p_top3",
    "bound",
)


@dataclass(frozen=True)
class PhaseEstimate:
    bitstring: str
    phase: float
    energy: float
    p_max: float
    p_top3: float
    bound: float
    k: int
    tie: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def estimate(counts: Counts, spec: QpeSpec, window_center: float | None = None) -> PhaseEstimate:
    """Most frequent outcome, ties going to the smallest bitstring."""
    ranked = counts.most_common()
    if not ranked:
        raise ValueError("empty counts")
    winner, top = ranked[0]
    tie = len(ranked) > 1 and ranked[1][1] == top
    k = spec.k
    t = spec.evolution.t
    center = spec.resolved_window_center() if window_center is None else window_center
    phase = decode_phase(winner, k)
    energy = phase_to_energy(phase, t, center, spec.offset)
    p_top3 = sum(c for _, c in ranked[:3]) / counts.shots
    bound = theoretical_bound(k, t) if k >= 2 else math.inf
    return PhaseEstimate(winner, phase, energy, top / counts.shots, p_top3, bound, k, tie)


def kernel_distribution(phases, weights, k: int) -> np.ndarray:
    """``Pr(m) = sum_j w_j |2**-k sum_x exp(2 pi i x (phi_j - m/2**k))|**2``."""
    if not 1 <= k <= MAX_ANALYTIC_K:
        raise ValueError(f"analytic distribution supports 1 <= k <= {MAX_ANALYTIC_K}")
    n = 2**k
    m = np.arange(n)
    out = np.zeros(n)
    for phi, w in zip(phases, weights):
        if w == 0:
            continue
        # shift by whole turns is irrelevant; keep delta in [-1/2, 1/2)
        delta = (phi - m / n + 0.5) % 1.0 - 0.5
        s = np.sin(np.pi * delta)
        with np.errstate(divide="ignore", invalid="ignore"):
            amp = np.sin(np.pi * n * delta) / (n * s)
        amp = np.where(np.abs(s) < 1e-300, 1.0, amp)
        out += w * amp**2
    return out


def eigen_decomposition(spec: QpeSpec) -> tuple[np.ndarray, np.ndarray]:
    """Trotterised eigenphases in [0, 1) and overlaps of the initial state."""
    thetas, z = unitary_eigensystem(trotterized_unitary(spec.evolution))
    phases = (thetas / (2 * math.pi)) % 1.0
    weights = np.abs(z.conj().T @ spec.state_vector) ** 2
    return phases, weights


def analytic_distribution(spec: QpeSpec) -> np.ndarray:
    """Noiseless probability of each phase index ``m`` (readout decodes to m/2**k)."""
    phases, weights = eigen_decomposition(spec)
    return kernel_distribution(phases, weights, spec.k)


def distribution_over_bitstrings(probs: np.ndarray, k: int) -> dict[str, float]:
    return {encode_index(m, k): float(p) for m, p in enumerate(probs) if p > 0}


def counts_to_index_distribution(counts: Counts, k: int) -> np.ndarray:
    out = np.zeros(2**k)
    for bits, c in counts.histogram.items():
        out[decode_index(bits, k)] += c / counts.shots
    return out


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def precision_bits(e_est: float, e_ref: float) -> float:
    diff = abs(e_est - e_ref)
    return math.inf if diff == 0 else -math.log2(diff)


def reference_energy(spec: QpeSpec, window_center: float | None = None) -> float:
    """E_Trotter of the eigenstate that dominates the initial state.

    Largest overlap wins; near-equal overlaps go to the lower energy.
    """
    center = spec.resolved_window_center() if window_center is None else window_center
    phases, weights = eigen_decomposition(spec)
    t = spec.evolution.t
    energies = [phase_to_energy(p, t, center, spec.offset) for p in phases]
    order = sorted(range(len(phases)), key=lambda j: (-round(weights[j], 12), energies[j]))
    return float(energies[order[0]])


def trotter_reference_table(spec: QpeSpec, window_center: float | None = None):
    center = spec.resolved_window_center() if window_center is None else window_center
    u = trotterized_unitary(spec.evolution)
    return eigenphase_table(u, spec.evolution.t, center, spec.offset)


def fci_energy(spec: QpeSpec) -> float:
    """Lowest exact eigenvalue of the Hamiltonian, offset included."""
    return float(exact_eigs(spec.evolution.hamiltonian)[0])


def best_dyadic_probability(phase: float, k: int) -> float:
    """Noiseless probability of the dyadic nearest to ``phase``."""
    n = 2**k
    m = round(phase * n) % n
    return float(kernel_distribution([phase], [1.0], k)[m])


__all__ = [
    "CSV_COLUMNS",
    "PhaseEstimate",
    "analytic_distribution",
    "best_dyadic_probability",
    "counts_to_index_distribution",
    "decode_index",
    "decode_phase",
    "distribution_over_bitstrings",
    "eigen_decomposition",
    "estimate",
    "fci_energy",
    "kernel_distribution",
    "phase_bound",
    "phase_to_energy",
    "precision_bits",
    "reference_energy",
    "theoretical_bound",
    "total_variation",
    "trotter_reference_table",
]
