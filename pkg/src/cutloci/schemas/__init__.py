"""Pydantic schemas for configuration, parameters and run records."""
