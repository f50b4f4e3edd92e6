"""Path-conditioned Lode Runner level generation and evaluation toolkit."""

__version__ = "0.1.0"
