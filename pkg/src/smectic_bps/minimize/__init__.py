"""Discrete minimization of the energy on the periodic cell."""
