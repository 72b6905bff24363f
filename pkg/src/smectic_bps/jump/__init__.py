"""Parabola states, defect data and jump costs."""
