"""lieforge: exact verification of graded Lie brackets, Novikov products,
symplectic pairings, low-degree cohomology, and central extensions.

Everything is computed over exact rationals; no floating point enters any
verdict.
"""

__version__ = "0.1.0"
