# Lyre: an interpreter for lazy mixin programs with evaluation-order strategies.
from .errors import LyreError
from .parser import load

__version__ = "0.1.0"
