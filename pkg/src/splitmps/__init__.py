"""Tensor-network simulation of spin-boson dynamics with split local Hilbert spaces."""

__version__ = "0.1.0"
