"""A proof checker for cubical type theory with Fitch-style modalities."""

__version__ = "0.1.0"
