"""Grids, fields, finite-difference stencils and quadrature."""
