"""Run configuration: JSON schema validation and object construction."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import jsonschema

from .experiments import scene_circle_in_ring
from .grid import Grid
from .shapes import Ball, Box, Complement, Difference, Intersection, Shape, Union


class ConfigError(ValueError):
    """Raised for malformed run configurations (CLI exit code 2)."""


_NUMBER_ARRAY = {
    "type": "array",
    "items": {"type": "number"},
    "minItems": 1,
    "maxItems": 3,
}

_SHAPE_DEFS = {
    "shape": {
        "oneOf": [
            {"$ref": "#/$defs/ball"},
            {"$ref": "#/$defs/box"},
            {"$ref": "#/$defs/union"},
            {"$ref": "#/$defs/intersection"},
            {"$ref": "#/$defs/complement"},
            {"$ref": "#/$defs/difference"},
        ]
    },
    "ball": {
        "type": "object",
        "additionalProperties": False,
        "required": ["type", "center", "radius"],
        "properties": {
            "type": {"const": "ball"},
            "center": _NUMBER_ARRAY,
            "radius": {"type": "number", "exclusiveMinimum": 0},
        },
    },
    "box": {
        "type": "object",
        "additionalProperties": False,
        "required": ["type", "min", "max"],
        "properties": {
            "type": {"const": "box"},
            "min": _NUMBER_ARRAY,
            "max": _NUMBER_ARRAY,
        },
    },
    "union": {
        "type": "object",
        "additionalProperties": False,
        "required": ["type", "children"],
        "properties": {
            "type": {"const": "union"},
            "children": {"type": "array", "items": {"$ref": "#/$defs/shape"}, "minItems": 1},
            "exact": {"type": "boolean"},
        },
    },
    "intersection": {
        "type": "object",
        "additionalProperties": False,
        "required": ["type", "children"],
        "properties": {
            "type": {"const": "intersection"},
            "children": {"type": "array", "items": {"$ref": "#/$defs/shape"}, "minItems": 1},
            "exact": {"type": "boolean"},
        },
    },
    "complement": {
        "type": "object",
        "additionalProperties": False,
        "required": ["type", "child"],
        "properties": {
            "type": {"const": "complement"},
            "child": {"$ref": "#/$defs/shape"},
        },
    },
    "difference": {
        "type": "object",
        "additionalProperties": False,
        "required": ["type", "a", "b"],
        "properties": {
            "type": {"const": "difference"},
            "a": {"$ref": "#/$defs/shape"},
            "b": {"$ref": "#/$defs/shape"},
            "exact": {"type": "boolean"},
        },
    },
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["scene"],
    "properties": {
        "scene": {
            "oneOf": [
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["a", "b"],
                    "properties": {
                        "a": {"$ref": "#/$defs/shape"},
                        "b": {"$ref": "#/$defs/shape"},
                    },
                },
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["preset", "dim"],
                    "properties": {
                        "preset": {"const": "circle_in_ring"},
                        "dim": {"type": "integer", "minimum": 1, "maximum": 3},
                        "displacement": _NUMBER_ARRAY,
                        "outer_radius": {"type": "number", "exclusiveMinimum": 0},
                        "ring_width": {"type": "number", "exclusiveMinimum": 0},
                        "inner_radius": {"type": "number", "exclusiveMinimum": 0},
                    },
                },
            ]
        },
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "required": ["origin", "h", "counts"],
            "properties": {
                "dim": {"type": "integer", "minimum": 1, "maximum": 3},
                "origin": _NUMBER_ARRAY,
                "h": {"type": "number", "exclusiveMinimum": 0},
                "counts": {
                    "type": "array",
                    "items": {"type": "integer", "minimum": 2},
                    "minItems": 1,
                    "maxItems": 3,
                },
            },
        },
        "operation": {"enum": ["compute", "bounds", "certify", "redistance"]},
        "parameters": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "oracle_gap": {"type": "number", "exclusiveMinimum": 0},
                "suitable_gap": {"type": "number", "exclusiveMinimum": 0},
                "certify_radius": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "seed": {"type": "integer", "minimum": 0},
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "report": {"type": "string"},
                "field_csv": {"type": "string"},
                "field_binary": {"type": "string"},
            },
        },
    },
    "$defs": _SHAPE_DEFS,
}


def shape_from_json(node: dict) -> Shape:
    kind = node["type"]
    if kind == "ball":
        return Ball(tuple(node["center"]), node["radius"])
    if kind == "box":
        return Box(tuple(node["min"]), tuple(node["max"]))
    if kind == "union":
        return Union(
            tuple(shape_from_json(c) for c in node["children"]),
            exact=node.get("exact", False),
        )
    if kind == "intersection":
        return Intersection(
            tuple(shape_from_json(c) for c in node["children"]),
            exact=node.get("exact", False),
        )
    if kind == "complement":
        return Complement(shape_from_json(node["child"]))
    if kind == "difference":
        return Difference(
            shape_from_json(node["a"]),
            shape_from_json(node["b"]),
            exact=node.get("exact", False),
        )
    raise ConfigError(f"unknown shape type {kind!r}")


@dataclass(frozen=True)
class RunConfig:
    shape_a: Shape
    shape_b: Shape
    grid: Optional[Grid]
    operation: Optional[str]
    oracle_gap: Optional[float]
    suitable_gap: Optional[float]
    certify_radius: Optional[float]
    seed: int
    output: dict


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return parse_config(raw)


def parse_config(raw: dict) -> RunConfig:
    try:
        jsonschema.validate(raw, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"config rejected: {exc.message}") from exc

    scene = raw["scene"]
    try:
        if "preset" in scene:
            dim = scene["dim"]
            disp = scene.get("displacement")
            built = scene_circle_in_ring(
                dim,
                tuple(disp) if disp is not None else (0.0,) * dim,
                outer_radius=scene.get("outer_radius", 9.0),
                ring_width=scene.get("ring_width", 1.0),
                inner_radius=scene.get("inner_radius", 1.0),
            )
            shape_a, shape_b = built.shape_a, built.shape_b
        else:
            shape_a = shape_from_json(scene["a"])
            shape_b = shape_from_json(scene["b"])
        grid = Grid.from_json_dict(raw["grid"]) if "grid" in raw else None
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"config rejected: {exc}") from exc
    if shape_a.dim != shape_b.dim:
        raise ConfigError("config rejected: scene shapes have different dimensions")
    if grid is not None and grid.dim != shape_a.dim:
        raise ConfigError("config rejected: grid and scene dimensions differ")

    params = raw.get("parameters", {})
    return RunConfig(
        shape_a=shape_a,
        shape_b=shape_b,
        grid=grid,
        operation=raw.get("operation"),
        oracle_gap=params.get("oracle_gap"),
        suitable_gap=params.get("suitable_gap"),
        certify_radius=params.get("certify_radius"),
        seed=raw.get("seed", 0),
        output=raw.get("output", {}),
    )
