"""Bergman metric geometry of the symmetrized bidisc."""
