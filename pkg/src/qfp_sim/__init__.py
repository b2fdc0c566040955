"""Readout fidelity of flux qubits measured through a quantum flux parametron."""

__version__ = "0.1.0"
