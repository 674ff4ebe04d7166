"""Dissipative quantum-neural-network autoencoders for denoising GHZ states."""

__version__ = "0.1.0"
