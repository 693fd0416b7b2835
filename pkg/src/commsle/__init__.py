"""Commuting SLEs: exact operator algebra and Loewner-chain Monte Carlo."""

__version__ = "0.1.0"
