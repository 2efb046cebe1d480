"""pelastica test suite."""
