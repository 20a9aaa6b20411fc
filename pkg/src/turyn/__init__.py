"""Mahler measures and L_q norms of Fekete, Turyn and companion Littlewood polynomials."""

__version__ = "0.1.0"
