"""Quadratic-twist central L-values from ternary theta series, SO(2N)
random-matrix statistics, and the moment / vanishing predictions they feed.
"""

from . import arith, curves, predict, rmt, theta
from .errors import ConvergenceError, DataError, PoleError

__version__ = "0.1.0"

__all__ = [
    "arith",
    "curves",
    "theta",
    "rmt",
    "predict",

    "ConvergenceError",
    "DataError",
    "PoleError",
]
