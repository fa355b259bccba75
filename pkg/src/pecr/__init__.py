"""Computability-logic proof kernel: program lists, irreducible extended
programs, proof checking and search, integer-matrix codecs, a zero-order
evaluator and fully-discrete dynamical-system certification."""

from .errors import CapacityError, ParseError, PecrError

__all__ = ["PecrError", "ParseError", "CapacityError"]
__version__ = "0.1.0"
