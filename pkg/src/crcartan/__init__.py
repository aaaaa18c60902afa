"""Exact Cartan-method computations for 5-dimensional CR submanifolds of C^4."""

from .exact import Context, Expr, GaussRat, I, Poly, conj, diff, normalize, parse, render, standard_context

__all__ = [
    "Context", "Expr", "GaussRat", "I", "Poly",
    "conj", "diff", "normalize", "parse", "render", "standard_context",
]
