"""Set-transformed Reed-Solomon array codes with low single-node repair bandwidth."""

__version__ = "0.1.0"
