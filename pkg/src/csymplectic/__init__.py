"""Verification toolkit for C-symplectic structures, degenerate twistor
deformations of Lagrangian fibrations, Moser isotopies and K3 lattice periods."""

__version__ = "0.1.0"
