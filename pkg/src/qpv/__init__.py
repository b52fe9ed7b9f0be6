"""Single-qubit position-verification simulator and verification toolkit."""

__version__ = "0.1.0"
