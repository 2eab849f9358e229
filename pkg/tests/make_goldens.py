"""Regenerate the golden files under tests/golden/.

Run manually from the repo root:  python tests/make_goldens.py

Derived values are produced by the independent oracles in oracles.py
(reference FNV-1a walk, reference splitmix64) and cross-checked against
the production code before being frozen; a mismatch aborts generation.
"""

from __future__ import annotations

import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from demo import build_demo_space
from oracles import fnv1a64_reference, mix_reference, splitmix64_reference

from slowspace import model
from slowspace.materialize import export_bytes
from slowspace.model import GridSpec, ItemKind
from slowspace.pcg import (
    SCALE_MAX,
    SCALE_MIN,
    default_catalog,
    expand_item,
    item_rng,
)

GOLDEN = Path(__file__).parent / "golden"


def oracle_expand_tree(space, item, template):
    """Replay the expansion algorithm with the reference PRNG only."""

    class Draws:
        def __init__(self, seed):
            self.gen = splitmix64_reference(seed)

        def u64(self):
            return next(self.gen)

        def uniform(self):
            return (self.u64() >> 11) * (1.0 / (1 << 53))

        def randint(self, lo, hi):
            return lo + self.u64() % (hi - lo + 1)

    def stream(n):
        return Draws(mix_reference(space.seed, item.id, n))

    cs = space.grid.cell_size
    center = ((item.cell[0] + 0.5) * cs, (item.cell[1] + 0.5) * cs)
    extent = (space.grid.width * cs, space.grid.height * cs)
    out = []
    r0 = stream(0)
    variant = r0.randint(1, template.primary_variants)
    out.append(
        (
            f"{item.kind.value}/variant_{variant}",
            (center[0], 0.0, center[1]),
            r0.uniform() * 360.0,
            SCALE_MIN + r0.uniform() * (SCALE_MAX - SCALE_MIN),
        )
    )
    rc = stream(1)
    counts = [rc.randint(r.min_count, r.max_count) for r in template.companion_rules]
    for i, rule in enumerate(template.companion_rules):
        rng = stream(2 + i)
        for _ in range(counts[i]):
            pos = None
            for _attempt in range(16):
                rad = rng.uniform() * rule.radius
                th = rng.uniform() * 2.0 * math.pi
                px = center[0] + rad * math.cos(th)
                pz = center[1] + rad * math.sin(th)
                if not (0.0 <= px < extent[0] and 0.0 <= pz < extent[1]):
                    continue
                if rule.forbid_water:
                    cx = min(int(px // cs), space.grid.width - 1)
                    cy = min(int(pz // cs), space.grid.height - 1)
                    if space.terrain_at((cx, cy)) == model.Terrain.WATER:
                        continue
                pos = (px, pz)
                break
            if pos is None:
                continue
            out.append(
                (
                    rule.mesh_family,
                    (pos[0], 0.0, pos[1]),
                    rng.uniform() * 360.0,
                    SCALE_MIN + rng.uniform() * (SCALE_MAX - SCALE_MIN),
                )
            )
    return out


def main():
    GOLDEN.mkdir(exist_ok=True)

    # fresh-space hash, via the reference FNV walk
    fresh = model.new_space("s1", "demo", 42, GridSpec(16, 16, 2.0))
    fresh_hash = fnv1a64_reference(model.canonical_bytes(fresh))
    assert fresh_hash == model.scene_hash(fresh), "FNV implementations disagree"
    (GOLDEN / "fresh_16x16_seed42.hash").write_text(f"{fresh_hash}\n")

    # first draw of the (42, 1, 0) stream, via the reference PRNG
    first_draw = next(splitmix64_reference(mix_reference(42, 1, 0)))
    assert first_draw == item_rng(42, 1, 0).next_u64(), "PRNG streams disagree"
    (GOLDEN / "stream_42_1_0.first").write_text(f"{first_draw}\n")

    # tree expansion, cross-checked instance by instance against the oracle
    tree_space = model.new_space("s1", "demo", 42, GridSpec(16, 16, 2.0))
    tree_space, _ = model.place_item(tree_space, ItemKind.TREE, (3, 2))
    item = tree_space.items[0]
    template = next(t for t in default_catalog() if t.kind == ItemKind.TREE)
    expected = oracle_expand_tree(tree_space, item, template)
    actual = expand_item(tree_space, item, template)
    assert len(expected) == len(actual), "expansion lengths disagree"
    for exp, act in zip(expected, actual):
        assert exp[0] == act.mesh
        assert exp[1] == (act.position.x, act.position.y, act.position.z)
        assert exp[2] == act.yaw_deg
        assert exp[3] == act.scale
    doc = [
        {
            "mesh": i.mesh,
            "position": [i.position.x, i.position.y, i.position.z],
            "yaw_deg": i.yaw_deg,
            "scale": i.scale,
            "source_item": i.source_item,
        }
        for i in actual
    ]
    (GOLDEN / "tree_expansion.json").write_text(
        model.write_canonical_json(doc) + "\n"
    )

    # scripted demo space: file, hash, scene export
    demo = build_demo_space()
    assert model.validate_space(demo) == []
    (GOLDEN / "demo_space.json").write_bytes(model.canonical_bytes(demo))
    demo_hash = fnv1a64_reference(model.canonical_bytes(demo))
    assert demo_hash == model.scene_hash(demo)
    (GOLDEN / "demo_space.hash").write_text(f"{demo_hash}\n")
    (GOLDEN / "demo_scene.json").write_bytes(export_bytes(demo, default_catalog()))

    print("goldens written to", GOLDEN)


if __name__ == "__main__":
    main()
