class ConstructionError(RuntimeError):
    """A constructed object failed its own invariants (a bug, not bad input)."""
