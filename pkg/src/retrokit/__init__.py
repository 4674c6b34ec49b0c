"""retrokit: desk-scale computer-aided synthesis planning."""

__version__ = "0.1.0"
