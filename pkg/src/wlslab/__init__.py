"""Mixed-precision iterative refinement laboratory for weighted least squares."""

__version__ = "0.1.0"
