"""Computational capacity bounds from organism growth morphology."""

from ._core import *  # noqa: F401,F403
from ._core import Error, UsageError, DataError, NumericalError  # noqa: F401

__version__ = "0.1.0"
