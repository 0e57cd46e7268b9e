"""Exception types shared across the workbench."""

__all__ = ["DomainError", "SpacelikeError", "ConfigError"]


class DomainError(ValueError):
    """A time value or parameter lies outside its admissible domain."""


class SpacelikeError(ValueError):
    """A graph violates the spacelike constraint; carries the worst node."""

    def __init__(self, message, worst_index=None, worst_coords=None, margin=None):
        super().__init__(message)
        self.worst_index = worst_index
        self.worst_coords = worst_coords
        self.margin = margin


class ConfigError(ValueError):
    """An experiment configuration failed schema or semantic validation."""
