"""Gaussian simulation of two bosonic modes in a shared Ornstein-Uhlenbeck reservoir."""

__version__ = "0.1.0"
