"""Fixed-depth synthesis of 1-, 2- and 3-qubit unitaries."""

from ..circuit import Circuit
from .one_qubit import synth_1q, zyz_angles
from .three_qubit import synth_3q
from .two_qubit import kak_decompose, num_cx_required, synth_2q, weyl_coordinates
from .unitary import (
    SynthesisError,
    UnitaryMatrix,
    controlled_block,
    polar_unitary,
    unitarity_defect,
)

_BY_DIM = {2: synth_1q, 4: synth_2q, 8: synth_3q}


def synthesize(u) -> Circuit:
    """Dispatch on the matrix size."""
    mat = UnitaryMatrix.of(u).matrix
    try:
        return _BY_DIM[mat.shape[0]](mat)
    except KeyError:
        raise SynthesisError(f"no synthesis for dimension {mat.shape[0]}") from None


__all__ = [
    "SynthesisError",
    "UnitaryMatrix",
    "controlled_block",
    "kak_decompose",
    "num_cx_required",
    "polar_unitary",
    "synth_1q",
    "synth_2q",
    "synth_3q",
    "synthesize",
    "unitarity_defect",
    "weyl_coordinates",
    "zyz_angles",
]
