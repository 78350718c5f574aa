"""Explorer tab views."""
