"""Deterministic expansion of placed items into instance "ecosystems".

Every replica holding the same Space value produces a bit-identical
instance list: randomness comes only from splitmix64 streams keyed by
(space seed, item id, stream index), never from draw order or history.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import MissingTemplate, TemplateMismatch
from .model import ItemKind, PlacedItem, Space, Terrain, WorldPoint, grid_to_world

_U64 = 0xFFFFFFFFFFFFFFFF
_GAMMA = 0x9E3779B97F4A7C15

MAX_SCATTER_ATTEMPTS = 16
SCALE_MIN = 0.75
SCALE_MAX = 1.25


def _finalize(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _U64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _U64
    return z ^ (z >> 31)


def _rotl(x: int, r: int) -> int:
    return ((x << r) | (x >> (64 - r))) & _U64


class SplitMix64:
    """The published splitmix64 recurrence, bit-exact."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _U64

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _U64
        return _finalize(self.state)

    def uniform(self) -> float:
        """Uniform in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] (modulo reduction, fixed for interop)."""
        return lo + self.next_u64() % (hi - lo + 1)


def _splitmix64_output(state: int) -> int:
    return _finalize((state + _GAMMA) & _U64)


def mix_seed(a: int, b: int, c: int) -> int:
    t = _splitmix64_output((a ^ _rotl(b, 17)) & _U64)
    return _splitmix64_output((t ^ _rotl(c, 31)) & _U64)


def item_rng(space_seed: int, item_id: int, stream: int) -> SplitMix64:
    return SplitMix64(mix_seed(space_seed & _U64, item_id & _U64, stream & _U64))


@dataclass(frozen=True)
class CompanionRule:
    mesh_family: str
    min_count: int
    max_count: int
    radius: float
    forbid_water: bool = False


@dataclass(frozen=True)
class EcosystemTemplate:
    kind: ItemKind
    primary_variants: int
    companion_rules: tuple[CompanionRule, ...] = ()


@dataclass(frozen=True)
class ExpansionInstance:
    mesh: str
    position: WorldPoint
    yaw_deg: float
    scale: float
    source_item: int


def default_catalog() -> list[EcosystemTemplate]:
    return _catalog_from_docs(json.loads(_DEFAULT_CATALOG_JSON))


def load_catalog(path: str) -> list[EcosystemTemplate]:
    with open(path, "r", encoding="utf-8") as f:
        return _catalog_from_docs(json.load(f))


def _catalog_from_docs(docs: list[dict]) -> list[EcosystemTemplate]:
    out = []
    for d in docs:
        rules = tuple(
            CompanionRule(
                mesh_family=r["mesh_family"],
                min_count=int(r["min_count"]),
                max_count=int(r["max_count"]),
                radius=float(r["radius"]),
                forbid_water=bool(r.get("forbid_water", False)),
            )
            for r in d.get("companion_rules", [])
        )
        for r in rules:
            if r.min_count > r.max_count:
                raise ValueError(f"rule {r.mesh_family}: min > max")
        out.append(
            EcosystemTemplate(
                kind=ItemKind(d["kind"]),
                primary_variants=int(d["primary_variants"]),
                companion_rules=rules,
            )
        )
    return out


_DEFAULT_CATALOG_JSON = """
[
  {"kind": "tree", "primary_variants": 4, "companion_rules": [
    {"mesh_family": "grass_tuft", "min_count": 5, "max_count": 12,
     "radius": 2.0, "forbid_water": true},
    {"mesh_family": "mushroom", "min_count": 0, "max_count": 3,
     "radius": 1.5, "forbid_water": true}]},
  {"kind": "boulder", "primary_variants": 10, "companion_rules": [
    {"mesh_family": "pebble", "min_count": 0, "max_count": 4,
     "radius": 1.0, "forbid_water": false}]},
  {"kind": "flower_patch", "primary_variants": 3, "companion_rules": [
    {"mesh_family": "flower", "min_count": 8, "max_count": 20,
     "radius": 1.5, "forbid_water": true}]},
  {"kind": "bench", "primary_variants": 2, "companion_rules": []},
  {"kind": "statue", "primary_variants": 2, "companion_rules": []},
  {"kind": "well", "primary_variants": 1, "companion_rules": []}
]
"""


def _cell_at(space: Space, x: float, z: float) -> tuple[int, int]:
    cs = space.grid.cell_size
    cx = min(int(x // cs), space.grid.width - 1)
    cy = min(int(z // cs), space.grid.height - 1)
    return (cx, cy)


def expand_item(
    space: Space, item: PlacedItem, template: EcosystemTemplate
) -> list[ExpansionInstance]:
    if template.kind != item.kind:
        raise TemplateMismatch(
            f"template for {template.kind.value}, item is {item.kind.value}"
        )
    center = grid_to_world(space.grid, item.cell)
    extent_x = space.grid.width * space.grid.cell_size
    extent_z = space.grid.height * space.grid.cell_size

    out: list[ExpansionInstance] = []

    rng0 = item_rng(space.seed, item.id, 0)
    variant = rng0.randint(1, template.primary_variants)
    yaw = rng0.uniform() * 360.0
    scale = SCALE_MIN + rng0.uniform() * (SCALE_MAX - SCALE_MIN)
    out.append(
        ExpansionInstance(
            mesh=f"{item.kind.value}/variant_{variant}",
            position=center,
            yaw_deg=yaw,
            scale=scale,
            source_item=item.id,
        )
    )

    rng_counts = item_rng(space.seed, item.id, 1)
    counts = [
        rng_counts.randint(rule.min_count, rule.max_count)
        for rule in template.companion_rules
    ]

    for rule_index, rule in enumerate(template.companion_rules):
        rng = item_rng(space.seed, item.id, 2 + rule_index)
        for _ in range(counts[rule_index]):
            placed = None
            for _attempt in range(MAX_SCATTER_ATTEMPTS):
                r = rng.uniform() * rule.radius
                theta = rng.uniform() * 2.0 * math.pi
                px = center.x + r * math.cos(theta)
                pz = center.z + r * math.sin(theta)
                if not (0.0 <= px < extent_x and 0.0 <= pz < extent_z):
                    continue
                if rule.forbid_water:
                    if space.terrain_at(_cell_at(space, px, pz)) == Terrain.WATER:
                        continue
                placed = (px, pz)
                break
            if placed is None:
                continue  # companion skipped after exhausting attempts
            yaw = rng.uniform() * 360.0
            scale = SCALE_MIN + rng.uniform() * (SCALE_MAX - SCALE_MIN)
            out.append(
                ExpansionInstance(
                    mesh=rule.mesh_family,
                    position=WorldPoint(x=placed[0], y=0.0, z=placed[1]),
                    yaw_deg=yaw,
                    scale=scale,
                    source_item=item.id,
                )
            )
    return out


def expand_scene(
    space: Space, catalog: list[EcosystemTemplate]
) -> list[ExpansionInstance]:
    by_kind = {t.kind: t for t in catalog}
    missing = {it.kind for it in space.items} - by_kind.keys()
    if missing:
        raise MissingTemplate(
            "no template for: " + ", ".join(sorted(k.value for k in missing))
        )
    out: list[ExpansionInstance] = []
    for item in sorted(space.items, key=lambda it: it.id):
        out.extend(expand_item(space, item, by_kind[item.kind]))
    return out
