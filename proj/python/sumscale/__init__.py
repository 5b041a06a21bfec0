"""Optimization of functions with sum and scale constraints."""

from ._sumscale import *  # noqa: F401,F403
from ._sumscale import __doc__  # noqa: F401

__version__ = "0.1.0"
