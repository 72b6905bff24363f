"""Compactness diagnostics: defect norms, entropy production, norms and rate fits."""
