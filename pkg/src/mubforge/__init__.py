"""Mutually unbiased bases from nice error bases, with checks of their group-theoretic limits."""

__version__ = "0.1.0"
