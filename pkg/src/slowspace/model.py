"""Authoritative scene model: grid, terrain, walls, items, time of day,
behavioral residue, and the canonical byte form used for snapshots,
persistence and hashing.

Every operation either raises an EditError and leaves its input untouched,
or returns a new Space with exactly the documented changes. Space values
are never mutated after construction.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass
from enum import Enum

from .errors import CellFull, InvalidGrid, NoSuchItem, OutOfBounds

MAX_GRID = 256
MIN_CELL_SIZE = 0.5
MAX_CELL_SIZE = 10.0
MAX_ITEMS_PER_CELL = 8

FNV64_OFFSET = 0xCBF29CE484222325
FNV64_PRIME = 0x100000001B3
_U64 = 0xFFFFFFFFFFFFFFFF


class Terrain(Enum):
    GRASS = "g"
    ROCK = "r"
    WATER = "w"

    def next_in_cycle(self) -> "Terrain":
        order = [Terrain.GRASS, Terrain.ROCK, Terrain.WATER]
        return order[(order.index(self) + 1) % 3]


class TimeOfDay(Enum):
    MORNING = "morning"
    DUSK = "dusk"
    NIGHT = "night"

    def next_in_cycle(self) -> "TimeOfDay":
        order = [TimeOfDay.MORNING, TimeOfDay.DUSK, TimeOfDay.NIGHT]
        return order[(order.index(self) + 1) % 3]


class ItemKind(Enum):
    TREE = "tree"
    BOULDER = "boulder"
    BENCH = "bench"
    FLOWER_PATCH = "flower_patch"
    STATUE = "statue"
    WELL = "well"


@dataclass(frozen=True)
class GridSpec:
    width: int
    height: int
    cell_size: float

    def validate(self) -> None:
        if not (isinstance(self.width, int) and 1 <= self.width <= MAX_GRID):
            raise InvalidGrid(f"width {self.width} outside 1..{MAX_GRID}")
        if not (isinstance(self.height, int) and 1 <= self.height <= MAX_GRID):
            raise InvalidGrid(f"height {self.height} outside 1..{MAX_GRID}")
        if not (MIN_CELL_SIZE <= self.cell_size <= MAX_CELL_SIZE):
            raise InvalidGrid(
                f"cell_size {self.cell_size} outside "
                f"{MIN_CELL_SIZE}..{MAX_CELL_SIZE}"
            )

    def in_bounds(self, cell: tuple[int, int]) -> bool:
        x, y = cell
        return 0 <= x < self.width and 0 <= y < self.height


@dataclass(frozen=True, order=True)
class WallEdge:
    # orientation sorts first so canonical wall order is (orientation, x, y)
    orientation: str  # "H" or "V"
    x: int
    y: int

    def check_range(self, grid: GridSpec) -> None:
        if self.orientation == "H":
            ok = 0 <= self.x < grid.width and 0 <= self.y <= grid.height
        elif self.orientation == "V":
            ok = 0 <= self.x <= grid.width and 0 <= self.y < grid.height
        else:
            ok = False
        if not ok:
            raise OutOfBounds(f"wall edge {self} invalid for grid")


@dataclass(frozen=True)
class PlacedItem:
    id: int
    kind: ItemKind
    cell: tuple[int, int]


@dataclass(frozen=True)
class WorldPoint:
    x: float
    y: float
    z: float


@dataclass(frozen=True)
class Space:
    space_id: str
    name: str
    seed: int
    grid: GridSpec
    terrain: tuple[Terrain, ...]
    walls: frozenset[WallEdge]
    items: tuple[PlacedItem, ...]  # ascending id
    time_of_day: TimeOfDay
    residue: tuple[float, ...]
    next_item_id: int
    op_seq: int

    def cell_index(self, cell: tuple[int, int]) -> int:
        return cell[1] * self.grid.width + cell[0]

    def terrain_at(self, cell: tuple[int, int]) -> Terrain:
        return self.terrain[self.cell_index(cell)]

    def residue_at(self, cell: tuple[int, int]) -> float:
        return self.residue[self.cell_index(cell)]

    def items_at(self, cell: tuple[int, int]) -> list[PlacedItem]:
        return [it for it in self.items if it.cell == cell]

    def find_item(self, item_id: int) -> PlacedItem | None:
        for it in self.items:
            if it.id == item_id:
                return it
        return None


def _evolve(space: "Space", **changes) -> "Space":
    """Shallow-copy a frozen Space with field overrides.

    Equivalent to dataclasses.replace but without re-running __init__;
    this sits on the hot path of op application and view rebuilds.
    """
    new = copy.copy(space)
    for k, v in changes.items():
        object.__setattr__(new, k, v)
    return new


def with_op_seq(space: "Space", op_seq: int) -> "Space":
    return _evolve(space, op_seq=op_seq)


def new_space(space_id: str, name: str, seed: int, grid: GridSpec) -> Space:
    grid.validate()
    n = grid.width * grid.height
    return Space(
        space_id=space_id,
        name=name,
        seed=seed & _U64,
        grid=grid,
        terrain=(Terrain.GRASS,) * n,
        walls=frozenset(),
        items=(),
        time_of_day=TimeOfDay.MORNING,
        residue=(0.0,) * n,
        next_item_id=1,
        op_seq=0,
    )


def set_terrain(space: Space, cell: tuple[int, int], terrain: Terrain) -> Space:
    if not space.grid.in_bounds(cell):
        raise OutOfBounds(f"cell {cell} outside grid")
    idx = space.cell_index(cell)
    t = list(space.terrain)
    t[idx] = terrain
    return _evolve(space, terrain=tuple(t))


def set_wall(space: Space, edge: WallEdge, present: bool) -> Space:
    edge.check_range(space.grid)
    walls = set(space.walls)
    if present:
        walls.add(edge)
    else:
        walls.discard(edge)
    return _evolve(space, walls=frozenset(walls))


def place_item(
    space: Space, kind: ItemKind, cell: tuple[int, int]
) -> tuple[Space, int]:
    if not space.grid.in_bounds(cell):
        raise OutOfBounds(f"cell {cell} outside grid")
    if len(space.items_at(cell)) >= MAX_ITEMS_PER_CELL:
        raise CellFull(f"cell {cell} already holds {MAX_ITEMS_PER_CELL} items")
    item_id = space.next_item_id
    item = PlacedItem(id=item_id, kind=kind, cell=cell)
    return (
        _evolve(space, items=space.items + (item,), next_item_id=item_id + 1),
        item_id,
    )


def move_item(space: Space, item_id: int, to_cell: tuple[int, int]) -> Space:
    item = space.find_item(item_id)
    if item is None:
        raise NoSuchItem(f"no item {item_id}")
    if not space.grid.in_bounds(to_cell):
        raise OutOfBounds(f"cell {to_cell} outside grid")
    occupants = [it for it in space.items_at(to_cell) if it.id != item_id]
    if len(occupants) >= MAX_ITEMS_PER_CELL:
        raise CellFull(f"cell {to_cell} already holds {MAX_ITEMS_PER_CELL} items")
    items = tuple(
        PlacedItem(id=it.id, kind=it.kind, cell=to_cell) if it.id == item_id else it
        for it in space.items
    )
    return _evolve(space, items=items)


def remove_item(space: Space, item_id: int) -> Space:
    if space.find_item(item_id) is None:
        raise NoSuchItem(f"no item {item_id}")
    items = tuple(it for it in space.items if it.id != item_id)
    return _evolve(space, items=items)


def set_time_of_day(space: Space, t: TimeOfDay) -> Space:
    return _evolve(space, time_of_day=t)


def set_residue(space: Space, cell: tuple[int, int], wear: float) -> Space:
    """Absolute residue write (server-side accumulation and replica deltas)."""
    if not space.grid.in_bounds(cell):
        raise OutOfBounds(f"cell {cell} outside grid")
    wear = min(1.0, max(0.0, wear))
    idx = space.cell_index(cell)
    r = list(space.residue)
    r[idx] = wear
    return _evolve(space, residue=tuple(r))


def grid_to_world(grid: GridSpec, cell: tuple[int, int]) -> WorldPoint:
    if not grid.in_bounds(cell):
        raise OutOfBounds(f"cell {cell} outside grid")
    cx, cy = cell
    return WorldPoint(
        x=(cx + 0.5) * grid.cell_size, y=0.0, z=(cy + 0.5) * grid.cell_size
    )


def cell_of_world(grid: GridSpec, p: WorldPoint) -> tuple[int, int]:
    if not (0.0 <= p.x < grid.width * grid.cell_size):
        raise OutOfBounds(f"x {p.x} outside extent")
    if not (0.0 <= p.z < grid.height * grid.cell_size):
        raise OutOfBounds(f"z {p.z} outside extent")
    cell = (int(math.floor(p.x / grid.cell_size)), int(math.floor(p.z / grid.cell_size)))
    # guard against float-division landing exactly on width/height
    return (min(cell[0], grid.width - 1), min(cell[1], grid.height - 1))


# --- canonical form ---------------------------------------------------------


class Fixed4(float):
    """Float serialized with exactly 4 decimal places in canonical JSON."""


def write_canonical_json(value) -> str:
    """Canonical JSON: sorted keys, no whitespace, UTF-8-ready, Fixed4
    floats rendered with 4 decimals, other floats via shortest repr."""
    if value is None:
        return "null"
    if isinstance(value, Fixed4):
        return f"{float(value):.4f}"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return json.dumps(value, allow_nan=False)
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(write_canonical_json(v) for v in value) + "]"
    if isinstance(value, dict):
        parts = [
            f"{json.dumps(k, ensure_ascii=False)}:{write_canonical_json(value[k])}"
            for k in sorted(value)
        ]
        return "{" + ",".join(parts) + "}"
    raise TypeError(f"not canonically serializable: {type(value)!r}")


def space_to_doc(space: Space) -> dict:
    return {
        "format": "slowspace",
        "version": 1,
        "space_id": space.space_id,
        "name": space.name,
        "seed": space.seed,
        "grid": {
            "width": space.grid.width,
            "height": space.grid.height,
            "cell_size": space.grid.cell_size,
        },
        "time_of_day": space.time_of_day.value,
        "terrain": [t.value for t in space.terrain],
        "walls": [
            [e.orientation, e.x, e.y]
            for e in sorted(space.walls)
        ],
        "items": [
            {"id": it.id, "kind": it.kind.value, "cell": [it.cell[0], it.cell[1]]}
            for it in sorted(space.items, key=lambda it: it.id)
        ],
        "residue": [Fixed4(r) for r in space.residue],
        "next_item_id": space.next_item_id,
        "op_seq": space.op_seq,
    }


def canonical_bytes(space: Space) -> bytes:
    return write_canonical_json(space_to_doc(space)).encode("utf-8")


_SPACE_KEYS = {
    "format", "version", "space_id", "name", "seed", "grid", "time_of_day",
    "terrain", "walls", "items", "residue", "next_item_id", "op_seq",
}


def space_from_doc(doc: dict) -> Space:
    if not isinstance(doc, dict):
        raise ValueError("space document must be an object")
    missing = _SPACE_KEYS - doc.keys()
    unknown = doc.keys() - _SPACE_KEYS
    if missing:
        raise ValueError(f"missing keys: {sorted(missing)}")
    if unknown:
        raise ValueError(f"unknown keys: {sorted(unknown)}")
    if doc["format"] != "slowspace" or doc["version"] != 1:
        raise ValueError("not a slowspace v1 file")
    g = doc["grid"]
    if not isinstance(g, dict) or set(g) != {"width", "height", "cell_size"}:
        raise ValueError("malformed grid")
    grid = GridSpec(width=g["width"], height=g["height"], cell_size=float(g["cell_size"]))
    terrain = tuple(Terrain(code) for code in doc["terrain"])
    walls = frozenset(
        WallEdge(orientation=w[0], x=w[1], y=w[2]) for w in doc["walls"]
    )
    items = tuple(
        PlacedItem(id=d["id"], kind=ItemKind(d["kind"]), cell=(d["cell"][0], d["cell"][1]))
        for d in doc["items"]
    )
    return Space(
        space_id=doc["space_id"],
        name=doc["name"],
        seed=int(doc["seed"]) & _U64,
        grid=grid,
        terrain=terrain,
        walls=walls,
        items=items,
        time_of_day=TimeOfDay(doc["time_of_day"]),
        residue=tuple(float(r) for r in doc["residue"]),
        next_item_id=int(doc["next_item_id"]),
        op_seq=int(doc["op_seq"]),
    )


def space_from_bytes(data: bytes) -> Space:
    return space_from_doc(json.loads(data.decode("utf-8")))


def fnv1a64(data: bytes) -> int:
    h = FNV64_OFFSET
    for b in data:
        h ^= b
        h = (h * FNV64_PRIME) & _U64
    return h


def scene_hash(space: Space) -> int:
    return fnv1a64(canonical_bytes(space))


def validate_space(space: Space) -> list[str]:
    """Return every invariant violation found (empty list means valid)."""
    violations: list[str] = []
    try:
        space.grid.validate()
    except InvalidGrid as e:
        violations.append(f"grid: {e}")
        return violations  # cell-count checks below would be meaningless
    n = space.grid.width * space.grid.height
    if len(space.terrain) != n:
        violations.append(f"terrain length {len(space.terrain)} != {n}")
    if len(space.residue) != n:
        violations.append(f"residue length {len(space.residue)} != {n}")
    for i, r in enumerate(space.residue):
        if not (0.0 <= r <= 1.0):
            violations.append(f"residue out of range at index {i}: {r}")
    for e in space.walls:
        try:
            e.check_range(space.grid)
        except OutOfBounds:
            violations.append(f"wall out of bounds: {e}")
    seen_ids: set[int] = set()
    counts: dict[tuple[int, int], int] = {}
    prev_id = 0
    for it in space.items:
        if not space.grid.in_bounds(it.cell):
            violations.append(f"item out of bounds: id {it.id} at {it.cell}")
        if it.id in seen_ids:
            violations.append(f"duplicate item id {it.id}")
        seen_ids.add(it.id)
        if it.id <= prev_id:
            violations.append(f"items not in ascending id order at id {it.id}")
        prev_id = max(prev_id, it.id)
        counts[it.cell] = counts.get(it.cell, 0) + 1
    for cell, c in counts.items():
        if c > MAX_ITEMS_PER_CELL:
            violations.append(f"cell {cell} holds {c} items (max {MAX_ITEMS_PER_CELL})")
    if space.items and space.next_item_id <= max(it.id for it in space.items):
        violations.append(
            f"next_item_id {space.next_item_id} not above max issued id"
        )
    if space.next_item_id < 1:
        violations.append(f"next_item_id {space.next_item_id} < 1")
    if space.op_seq < 0:
        violations.append(f"op_seq {space.op_seq} negative")
    return violations
