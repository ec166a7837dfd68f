"""Quaternionic linear algebra toolkit.

Covers quaternion matrices and their bistochastic images, sign-feasibility
systems on the Birkhoff polytope, Jacobian rank analysis of the entrywise
squared-norm maps, quaternionic Hadamard families and mutually unbiased
bases, plus a reproduction-oriented command line interface.
"""

from .qmatrix import QMatrix
from .quaternion import Quaternion
from .stochastic import BistochasticMatrix

__all__ = ["Quaternion", "QMatrix", "BistochasticMatrix"]
__version__ = "0.1.0"
