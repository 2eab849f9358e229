"""Space -> renderer-agnostic SceneDescription.

Output carries everything a 3D client needs: terrain tiles with wear,
wall segments as boxes, PCG-expanded instances, and a lighting preset.
Serialization follows the same canonical JSON rules as the space file so
exports are byte-stable.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    Fixed4,
    Space,
    TimeOfDay,
    WorldPoint,
    write_canonical_json,
)
from .pcg import EcosystemTemplate, ExpansionInstance, expand_scene

WALL_HEIGHT = 2.5
WALL_THICKNESS = 0.2

SCENE_FORMAT = "slowspace-scene"
SCENE_VERSION = 1


@dataclass(frozen=True)
class Lighting:
    preset: TimeOfDay
    sun_elevation_deg: float
    sun_azimuth_deg: float
    ambient: float


_LIGHTING_TABLE = {
    TimeOfDay.MORNING: Lighting(TimeOfDay.MORNING, 25.0, 110.0, 0.45),
    TimeOfDay.DUSK: Lighting(TimeOfDay.DUSK, 8.0, 260.0, 0.30),
    TimeOfDay.NIGHT: Lighting(TimeOfDay.NIGHT, -10.0, 0.0, 0.10),
}


def lighting_for(t: TimeOfDay) -> Lighting:
    return _LIGHTING_TABLE[t]


@dataclass(frozen=True)
class WallSegment:
    center: WorldPoint
    length: float
    yaw_deg: float
    height: float
    thickness: float


@dataclass(frozen=True)
class Tile:
    cell: tuple[int, int]
    terrain: str
    wear: float


@dataclass(frozen=True)
class SceneDescription:
    extent: tuple[float, float]  # width, depth in meters
    tiles: tuple[Tile, ...]
    walls: tuple[WallSegment, ...]
    instances: tuple[ExpansionInstance, ...]
    lighting: Lighting


def materialize(space: Space, catalog: list[EcosystemTemplate]) -> SceneDescription:
    cs = space.grid.cell_size
    tiles = []
    for cy in range(space.grid.height):
        for cx in range(space.grid.width):
            tiles.append(
                Tile(
                    cell=(cx, cy),
                    terrain=space.terrain_at((cx, cy)).value,
                    wear=space.residue_at((cx, cy)),
                )
            )
    walls = []
    for e in sorted(space.walls):
        if e.orientation == "H":
            center = WorldPoint((e.x + 0.5) * cs, WALL_HEIGHT / 2, e.y * cs)
            yaw = 0.0
        else:
            center = WorldPoint(e.x * cs, WALL_HEIGHT / 2, (e.y + 0.5) * cs)
            yaw = 90.0
        walls.append(
            WallSegment(
                center=center,
                length=cs,
                yaw_deg=yaw,
                height=WALL_HEIGHT,
                thickness=WALL_THICKNESS,
            )
        )
    return SceneDescription(
        extent=(space.grid.width * cs, space.grid.height * cs),
        tiles=tuple(tiles),
        walls=tuple(walls),
        instances=tuple(expand_scene(space, catalog)),
        lighting=lighting_for(space.time_of_day),
    )


def scene_to_doc(scene: SceneDescription) -> dict:
    return {
        "format": SCENE_FORMAT,
        "version": SCENE_VERSION,
        "extent": [scene.extent[0], scene.extent[1]],
        "tiles": [
            {"cell": list(t.cell), "terrain": t.terrain, "wear": Fixed4(t.wear)}
            for t in scene.tiles
        ],
        "walls": [
            {
                "center": [w.center.x, w.center.y, w.center.z],
                "length": w.length,
                "yaw_deg": w.yaw_deg,
                "height": w.height,
                "thickness": w.thickness,
            }
            for w in scene.walls
        ],
        "instances": [
            {
                "mesh": i.mesh,
                "position": [i.position.x, i.position.y, i.position.z],
                "yaw_deg": i.yaw_deg,
                "scale": i.scale,
                "source_item": i.source_item,
            }
            for i in scene.instances
        ],
        "lighting": {
            "preset": scene.lighting.preset.value,
            "sun_elevation_deg": scene.lighting.sun_elevation_deg,
            "sun_azimuth_deg": scene.lighting.sun_azimuth_deg,
            "ambient": scene.lighting.ambient,
        },
        "ambience": None,  # reserved for future nature-sound field
    }


def export_bytes(space: Space, catalog: list[EcosystemTemplate]) -> bytes:
    return write_canonical_json(scene_to_doc(materialize(space, catalog))).encode(
        "utf-8"
    )


def export_scene(space: Space, catalog: list[EcosystemTemplate], path: str) -> None:
    data = export_bytes(space, catalog)
    with open(path, "wb") as f:
        f.write(data)
