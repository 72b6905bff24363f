"""Energy functional, BPS decomposition and entropy field."""
