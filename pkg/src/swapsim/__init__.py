"""Simulator for entanglement swapping between two synchronized pulsed
entangled-photon sources."""

__version__ = "0.1.0"
