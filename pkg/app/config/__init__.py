"""Toolkit settings."""
