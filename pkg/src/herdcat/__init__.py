"""herdcat: exact verification of the quantum-groupoid structure carried
by a finite linear herd.

Everything is computed over GF(p) or the rationals with exact arithmetic,
so every axiom and preservation claim is checked as an equality.
"""

__version__ = "0.1.0"
