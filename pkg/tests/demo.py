"""The scripted demo space used by golden and acceptance tests: a fixed
sequence of 30 ops over a fresh 16x16 seed-42 space."""

from __future__ import annotations

from slowspace import model, protocol
from slowspace.model import GridSpec, ItemKind, Terrain, TimeOfDay, WallEdge
from slowspace.protocol import (
    MoveItem,
    PlaceItem,
    RemoveItem,
    SetTerrain,
    SetTimeOfDay,
    SetWall,
)

DEMO_OPS = [
    # a small pond
    SetTerrain((5, 5), Terrain.WATER),
    SetTerrain((6, 5), Terrain.WATER),
    SetTerrain((5, 6), Terrain.WATER),
    SetTerrain((6, 6), Terrain.WATER),
    # a rocky path toward it
    SetTerrain((2, 5), Terrain.ROCK),
    SetTerrain((3, 5), Terrain.ROCK),
    SetTerrain((4, 5), Terrain.ROCK),
    # a walled nook in the corner
    SetWall(WallEdge("H", 12, 12), True),
    SetWall(WallEdge("H", 13, 12), True),
    SetWall(WallEdge("V", 12, 12), True),
    SetWall(WallEdge("V", 12, 13), True),
    SetWall(WallEdge("H", 13, 12), False),  # open a doorway again
    # plant things
    PlaceItem(ItemKind.TREE, (3, 2)),       # id 1
    PlaceItem(ItemKind.TREE, (10, 3)),      # id 2
    PlaceItem(ItemKind.BOULDER, (8, 8)),    # id 3
    PlaceItem(ItemKind.FLOWER_PATCH, (4, 7)),  # id 4
    PlaceItem(ItemKind.FLOWER_PATCH, (4, 7)),  # id 5, stacked
    PlaceItem(ItemKind.BENCH, (13, 13)),    # id 6, in the nook
    PlaceItem(ItemKind.STATUE, (1, 14)),    # id 7
    PlaceItem(ItemKind.WELL, (9, 9)),       # id 8
    PlaceItem(ItemKind.TREE, (0, 0)),       # id 9
    # rearrange
    MoveItem(3, (7, 8)),
    MoveItem(6, (12, 13)),
    RemoveItem(9),
    PlaceItem(ItemKind.BOULDER, (0, 0)),    # id 10, ids never reused
    MoveItem(10, (0, 1)),
    # light it
    SetTimeOfDay(TimeOfDay.NIGHT),
    SetTimeOfDay(TimeOfDay.DUSK),
    SetTerrain((2, 5), Terrain.GRASS),
    SetTerrain((2, 5), Terrain.ROCK),  # absolute writes: last one wins
]


def build_demo_space() -> model.Space:
    space = model.new_space("demo", "demo garden", 42, GridSpec(16, 16, 2.0))
    for seq, op in enumerate(DEMO_OPS, start=1):
        space, _ = protocol.apply(space, op)
        space = model.with_op_seq(space, seq)
    return space
