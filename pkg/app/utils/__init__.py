"""Serialization and logging helpers."""
