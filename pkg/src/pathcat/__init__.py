"""Finite categories of paths: alignment, boundaries, groupoids, degrees and
operator-algebra presentations, each checked against brute force."""
from .core import CategoryError, PathCategory, StructuralError, Verdict, Violation, validate_category
from .formats import load

__all__ = ["CategoryError", "PathCategory", "StructuralError", "Verdict", "Violation",
           "load", "validate_category"]
__version__ = "0.1.0"
