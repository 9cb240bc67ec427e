"""CLI interface for cutloci."""
