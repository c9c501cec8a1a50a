"""Multi-ancilla quantum phase estimation with fixed-size synthesised blocks."""

__version__ = "0.1.0"
