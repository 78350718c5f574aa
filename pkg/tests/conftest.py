"""Shared pytest configuration."""

from hypothesis import settings

settings.register_profile("finsler", max_examples=500, deadline=None)
settings.load_profile("finsler")
