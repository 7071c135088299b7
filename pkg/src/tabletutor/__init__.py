"""Interactive predicate/operator learning for tabletop task planning."""

__version__ = "0.1.0"
