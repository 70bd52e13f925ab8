"""Development utilities."""
