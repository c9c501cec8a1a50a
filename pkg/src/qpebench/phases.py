"""Readout decoding: bitstrings to phases, phases to energies.

The inverse Fourier stage carries no SWAP gates, so the measured readout
bits come out reversed: readout qubit 0 holds the least significant bit of
the phase numerator.  Reversal is undone here.
"""

from __future__ import annotations

import math


def _check_bits(bitstring: str, k: int | None) -> int:
    if k is not None and len(bitstring) != k:
        raise ValueError(f"bitstring {bitstring!r} has length {len(bitstring)}, expected {k}")
    if not bitstring or set(bitstring) - {"0", "1"}:
        raise ValueError(f"not a bitstring: {bitstring!r}")
    return len(bitstring)


def decode_index(bitstring: str, k: int | None = None) -> int:
    """Phase numerator ``m`` of ``m / 2**k`` (bit-reversed readout integer)."""
    _check_bits(bitstring, k)
    return int(bitstring[::-1], 2)


def encode_index(m: int, k: int) -> str:
    """Readout bitstring that decodes to ``m / 2**k``."""
    if not 0 <= m < 2**k:
        raise ValueError(f"index {m} out of range for k={k}")
    return format(m, f"0{k}b")[::-1]


def decode_phase(bitstring: str, k: int | None = None) -> float:
    k = _check_bits(bitstring, k)
    return math.ldexp(decode_index(bitstring), -k)


def phase_to_energy(phase: float, t: float, window_center: float = 0.0, offset: float = 0.0) -> float:
    """Energy on the branch ``E = (phase + m)/t + offset`` lying in
    ``[window_center - 1/(2t), window_center + 1/(2t))``.
    """
    if not t > 0:
        raise ValueError("evolution time must be positive")
    center = (window_center - offset) * t
    m = math.ceil(center - 0.5 - phase)
    value = phase + m
    # guard the half-open edges against rounding in the subtraction above
    if value < center - 0.5:
        value += 1
    elif value >= center + 0.5:
        value -= 1
    return float(value / t + offset)


def energy_to_phase(energy: float, t: float, offset: float = 0.0) -> float:
    """``t (E - offset)`` reduced into [0, 1)."""
    phase = ((energy - offset) * t) % 1.0
    # a tiny negative argument rounds up to exactly 1.0
    return 0.0 if phase == 1.0 else phase


def on_window_edge(energy: float, t: float, window_center: float, atol: float = 1e-9) -> bool:
    """True when the branch choice is ambiguous (energy at the window boundary)."""
    lo = window_center - 0.5 / t
    return abs(energy - lo) <= atol


def phase_bound(k: int) -> float:
    if k < 2:
        raise ValueError("the precision bound needs k >= 2")
    return math.ldexp(1.0, -(k - 1))


def theoretical_bound(k: int, t: float) -> float:
    """Energy precision ``2**-(k-1) / t`` (one bit lost to discretisation)."""
    if not t > 0:
        raise ValueError("evolution time must be positive")
    return phase_bound(k) / t
