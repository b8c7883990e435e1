"""Unit tests for heun-forge."""
