"""Configuration, logging, errors, run orchestration and artifact storage."""
