"""Superselection-sector toolkit on finite causal diamond posets."""

__version__ = "0.1.0"
