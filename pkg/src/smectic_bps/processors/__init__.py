"""Run processors module."""
