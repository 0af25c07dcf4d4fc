"""Exact singular Poisson reduction and Groenewold-Moyal quantization checks."""

__version__ = "0.1.0"
