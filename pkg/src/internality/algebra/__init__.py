"""Exact arithmetic kernel."""
from .gcd import poly_gcd, poly_lcm
from .linalg import integer_vector, nullspace, rank, rref, solve
from .poly import DimensionError, MultiPoly, monomials_upto, partial_derivative, poly_arith
from .ratfunc import RationalFunction, rf_reduce
from .univariate import rational_roots, resultant, squarefree_factorization, squarefree_part

UniPoly = MultiPoly

__all__ = [
    "DimensionError", "MultiPoly", "RationalFunction", "UniPoly",
    "integer_vector", "monomials_upto", "nullspace", "partial_derivative",
    "poly_arith", "poly_gcd", "poly_lcm", "rank", "rational_roots", "resultant",
    "rf_reduce", "rref", "solve", "squarefree_factorization", "squarefree_part",
]
