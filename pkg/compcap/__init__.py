"""
This module initializes the compcap module and sets the version number for the module.

It is the entry point for the compcap package: weights of the spaces, symbols and their
composition operators, Green capacities of compact sets, and the harness that checks the
decay rate of the approximation numbers against exp(-1/cap) of the image.
"""

from compcap.config import Config

__version__ = "0.1.0"

__all__ = ["Config"]
