"""Exact verification engine for the bicovariant differential calculus on GL_q(n)."""

__version__ = "0.1.0"
