"""slowspace: server-authoritative collaborative scene editing engine."""

from .model import (
    GridSpec,
    ItemKind,
    PlacedItem,
    Space,
    Terrain,
    TimeOfDay,
    WallEdge,
    WorldPoint,
    canonical_bytes,
    new_space,
    scene_hash,
    validate_space,
)

__all__ = [
    "GridSpec",
    "ItemKind",
    "PlacedItem",
    "Space",
    "Terrain",
    "TimeOfDay",
    "WallEdge",
    "WorldPoint",
    "canonical_bytes",
    "new_space",
    "scene_hash",
    "validate_space",
]

__version__ = "0.1.0"
