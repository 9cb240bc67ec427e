"""Tests for cutloci."""
