"""Deformed Fomin-Kirillov algebras, elliptic Dunkl operators and braided symmetrizers."""

__version__ = "0.1.0"
