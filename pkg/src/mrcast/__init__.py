"""Pushback network coding for multi-resolution multicast, with baselines."""

__version__ = "0.1.0"
