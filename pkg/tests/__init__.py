"""Test suite for HR Data Dashboard."""
