"""Uniform lattice paths with a prescribed number of peaks: counts, bijections, samplers and limit checks."""

__version__ = "0.1.0"
