"""kedgelab: exact-arithmetic laboratory for k-edge graphs and translation range systems."""

__version__ = "0.1.0"
