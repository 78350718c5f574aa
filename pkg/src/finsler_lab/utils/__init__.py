"""Explorer helpers: charts, export and report health."""
