"""Data input/output modules."""
