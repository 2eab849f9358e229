import json

import pytest

from demo import build_demo_space
from slowspace import model
from slowspace.errors import MissingTemplate
from slowspace.materialize import (
    WALL_HEIGHT,
    export_bytes,
    export_scene,
    lighting_for,
    materialize,
)
from slowspace.model import GridSpec, ItemKind, TimeOfDay, WallEdge
from slowspace.pcg import default_catalog, expand_scene


def fresh():
    return model.new_space("s1", "demo", 42, GridSpec(16, 16, 2.0))


class TestMaterialize:
    def test_empty_space(self):
        scene = materialize(fresh(), default_catalog())
        assert len(scene.tiles) == 256
        assert scene.walls == ()
        assert scene.instances == ()
        assert scene.extent == (32.0, 32.0)

    def test_h_wall_geometry(self):
        s = model.set_wall(fresh(), WallEdge("H", 0, 0), True)
        scene = materialize(s, default_catalog())
        (w,) = scene.walls
        assert (w.center.x, w.center.y, w.center.z) == (1.0, 1.25, 0.0)
        assert w.length == 2.0
        assert w.yaw_deg == 0.0
        assert w.height == WALL_HEIGHT

    def test_v_wall_geometry(self):
        s = model.set_wall(fresh(), WallEdge("V", 2, 3), True)
        scene = materialize(s, default_catalog())
        (w,) = scene.walls
        assert (w.center.x, w.center.y, w.center.z) == (4.0, 1.25, 7.0)
        assert w.yaw_deg == 90.0

    def test_tiles_mirror_terrain_and_wear(self):
        s = model.set_terrain(fresh(), (3, 2), model.Terrain.WATER)
        s = model.set_residue(s, (3, 2), 0.5)
        scene = materialize(s, default_catalog())
        tile = next(t for t in scene.tiles if t.cell == (3, 2))
        assert tile.terrain == "w"
        assert tile.wear == 0.5

    def test_wall_count_matches(self):
        s = fresh()
        for e in [WallEdge("H", 0, 0), WallEdge("V", 5, 5), WallEdge("H", 9, 16)]:
            s = model.set_wall(s, e, True)
        assert len(materialize(s, default_catalog()).walls) == 3

    def test_missing_template(self):
        s, _ = model.place_item(fresh(), ItemKind.TREE, (0, 0))
        with pytest.raises(MissingTemplate):
            materialize(s, [])


class TestLighting:
    def test_presets(self):
        m = lighting_for(TimeOfDay.MORNING)
        assert (m.sun_elevation_deg, m.sun_azimuth_deg, m.ambient) == (25.0, 110.0, 0.45)
        d = lighting_for(TimeOfDay.DUSK)
        assert (d.sun_elevation_deg, d.sun_azimuth_deg, d.ambient) == (8.0, 260.0, 0.30)
        n = lighting_for(TimeOfDay.NIGHT)
        assert (n.sun_elevation_deg, n.sun_azimuth_deg, n.ambient) == (-10.0, 0.0, 0.10)

    def test_total_over_enum(self):
        for t in TimeOfDay:
            assert lighting_for(t).preset == t


class TestExport:
    def test_deterministic_bytes(self):
        demo = build_demo_space()
        assert export_bytes(demo, default_catalog()) == export_bytes(
            demo, default_catalog()
        )

    def test_export_twice_identical_files(self, tmp_path):
        demo = build_demo_space()
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        export_scene(demo, default_catalog(), str(a))
        export_scene(demo, default_catalog(), str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_instance_count_matches_expansion(self):
        demo = build_demo_space()
        doc = json.loads(export_bytes(demo, default_catalog()))
        assert len(doc["instances"]) == len(expand_scene(demo, default_catalog()))

    def test_schema_shape(self):
        doc = json.loads(export_bytes(fresh(), default_catalog()))
        assert doc["format"] == "slowspace-scene"
        assert doc["version"] == 1
        assert set(doc) == {
            "format", "version", "extent", "tiles", "walls", "instances",
            "lighting", "ambience",
        }
        assert doc["lighting"]["preset"] == "morning"
        assert doc["ambience"] is None

    def test_demo_golden(self, golden_dir):
        demo = build_demo_space()
        assert export_bytes(demo, default_catalog()) == (
            golden_dir / "demo_scene.json"
        ).read_bytes()

    def test_instances_within_extent(self):
        demo = build_demo_space()
        doc = json.loads(export_bytes(demo, default_catalog()))
        for inst in doc["instances"]:
            x, _, z = inst["position"]
            assert 0.0 <= x <= 32.0
            assert 0.0 <= z <= 32.0
