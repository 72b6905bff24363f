"""One-dimensional transition layer, ansatz fields and the Hopf-Cole route."""
