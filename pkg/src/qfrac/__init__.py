"""Fractional q-calculus numerics."""
