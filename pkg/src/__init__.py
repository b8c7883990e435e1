"""
heun-forge - series solutions of the non-stationary Heun equation.

Elliptic generalizations of the Jacobi polynomials and their generalized
eigenvalues, computed as truncated power series in the nome q.
"""

__version__ = "1.0.0"
