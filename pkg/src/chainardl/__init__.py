"""ARDL bounds-testing toolkit for daily on-chain and off-chain market data."""

from .errors import ChainArdlError

__version__ = "0.1.0"
__all__ = ["ChainArdlError", "__version__"]
