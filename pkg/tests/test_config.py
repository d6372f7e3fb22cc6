"""JSON run-configuration parsing: schema gates, shape building, defaults."""

import json

import pytest

from hausdorff_grid.config import (
    ConfigError,
    load_config,
    parse_config,
    shape_from_json,
)
from hausdorff_grid.shapes import Ball, Box, Difference, Union


def _csg_config():
    return {
        "scene": {
            "a": {"type": "ball", "center": [0.0, 0.0], "radius": 1.0},
            "b": {
                "type": "union",
                "children": [
                    {"type": "ball", "center": [0.0, 0.0], "radius": 1.0},
                    {"type": "box", "min": [2.0, 2.0], "max": [3.0, 3.0]},
                ],
            },
        },
        "grid": {"origin": [-4.0, -4.0], "h": 0.5, "counts": [17, 17]},
        "operation": "compute",
        "parameters": {"oracle_gap": 0.05},
        "seed": 3,
        "output": {"report": "report.json"},
    }


class TestParseConfig:
    def test_csg_scene(self):
        cfg = parse_config(_csg_config())
        assert isinstance(cfg.shape_a, Ball)
        assert isinstance(cfg.shape_b, Union)
        assert cfg.grid.h == 0.5 and cfg.grid.counts == (17, 17)
        assert cfg.operation == "compute"
        assert cfg.oracle_gap == 0.05
        assert cfg.suitable_gap is None and cfg.certify_radius is None
        assert cfg.seed == 3
        assert cfg.output == {"report": "report.json"}

    def test_preset_scene(self):
        cfg = parse_config(
            {"scene": {"preset": "circle_in_ring", "dim": 2, "displacement": [2.5, 0.0]}}
        )
        assert cfg.shape_a.dim == 2
        assert isinstance(cfg.shape_a, Union)
        assert isinstance(cfg.shape_b, Difference)
        assert cfg.grid is None and cfg.operation is None
        assert cfg.seed == 0 and cfg.output == {}

    def test_preset_defaults_to_centred(self):
        cfg = parse_config({"scene": {"preset": "circle_in_ring", "dim": 2}})
        # No displacement: the extra ball sits at the origin.
        assert isinstance(cfg.shape_a, Union)
        assert cfg.shape_a.children[1] == Ball((0.0, 0.0), 1.0)

    def test_nested_shapes(self):
        shape = shape_from_json(
            {
                "type": "difference",
                "a": {"type": "ball", "center": [0.0, 0.0], "radius": 2.0},
                "b": {
                    "type": "complement",
                    "child": {"type": "box", "min": [-1.0, -1.0], "max": [1.0, 1.0]},
                },
                "exact": True,
            }
        )
        assert isinstance(shape, Difference)
        assert shape.exact
        assert isinstance(shape.b.child, Box)

    @pytest.mark.parametrize(
        "mangle",
        [
            lambda raw: raw.update(extra=1),
            lambda raw: raw["scene"]["a"].update(colour="red"),
            lambda raw: raw["scene"]["a"].update(radius="big"),
            lambda raw: raw["scene"]["a"].update(radius=-1.0),
            lambda raw: raw["grid"].update(counts=[1, 17]),
            lambda raw: raw["grid"].pop("h"),
            lambda raw: raw.update(operation="summon"),
            lambda raw: raw["parameters"].update(oracle_gap=0.0),
            lambda raw: raw.update(seed=-1),
            lambda raw: raw["scene"].update(preset="circle_in_ring", dim=2),
        ],
    )
    def test_schema_rejections(self, mangle):
        raw = _csg_config()
        mangle(raw)
        with pytest.raises(ConfigError, match="config rejected"):
            parse_config(raw)

    def test_missing_scene(self):
        with pytest.raises(ConfigError, match="scene"):
            parse_config({"operation": "compute"})

    def test_shape_dim_mismatch(self):
        raw = _csg_config()
        raw["scene"]["b"] = {"type": "ball", "center": [0.0, 0.0, 0.0], "radius": 1.0}
        with pytest.raises(ConfigError, match="different dimensions"):
            parse_config(raw)

    def test_grid_dim_mismatch(self):
        raw = _csg_config()
        raw["grid"] = {"origin": [-4.0], "h": 0.5, "counts": [17]}
        with pytest.raises(ConfigError, match="grid and scene"):
            parse_config(raw)

    def test_invalid_geometry_is_wrapped(self):
        raw = {
            "scene": {
                "a": {"type": "box", "min": [1.0, 1.0], "max": [0.0, 0.0]},
                "b": {"type": "ball", "center": [0.0, 0.0], "radius": 1.0},
            }
        }
        with pytest.raises(ConfigError, match="config rejected"):
            parse_config(raw)

    def test_preset_validation_is_wrapped(self):
        raw = {
            "scene": {
                "preset": "circle_in_ring",
                "dim": 2,
                "displacement": [7.5, 0.0],
            }
        }
        with pytest.raises(ConfigError, match="config rejected"):
            parse_config(raw)


class TestLoadConfig:
    def test_reads_json_file(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps(_csg_config()))
        cfg = load_config(path)
        assert cfg.operation == "compute"

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(tmp_path / "nope.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError, match="not valid JSON"):
            load_config(path)
