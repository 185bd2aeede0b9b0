"""Test suite for STT Analytics Platform."""
