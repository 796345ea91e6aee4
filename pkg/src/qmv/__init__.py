"""Exact classical simulator for quantum matrix-product verification and
output-sensitive matrix multiplication."""

__version__ = "0.1.0"
