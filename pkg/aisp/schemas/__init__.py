"""Pandera schemas for data validation."""
