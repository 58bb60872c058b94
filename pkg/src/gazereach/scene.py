"""Static scene model: labeled boxes on a dining table plus the container taxonomy."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np


class SceneError(ValueError):
    """Scene document failed validation; message names the offending field."""


class ObjectClass(Enum):
    APPLE = "Apple"
    ORANGE = "Orange"
    CUP = "Cup"
    BOWL = "Bowl"
    TABLE = "Table"


class ContainerKind(Enum):
    NON_CONTAINER = "NonContainer"
    SMALL_CONTAINER = "SmallContainer"
    LARGE_CONTAINER = "LargeContainer"
    SURFACE = "Surface"


_CLASS_KIND = {
    ObjectClass.APPLE: ContainerKind.NON_CONTAINER,
    ObjectClass.ORANGE: ContainerKind.NON_CONTAINER,
    ObjectClass.CUP: ContainerKind.SMALL_CONTAINER,
    ObjectClass.BOWL: ContainerKind.LARGE_CONTAINER,
    ObjectClass.TABLE: ContainerKind.SURFACE,
}

GRASPABLE_KINDS = frozenset({ContainerKind.NON_CONTAINER, ContainerKind.SMALL_CONTAINER})
CONTAINER_KINDS = frozenset({ContainerKind.SMALL_CONTAINER, ContainerKind.LARGE_CONTAINER})


def classify_object(cls: ObjectClass) -> ContainerKind:
    """Total mapping from object class to its container-taxonomy role."""
    return _CLASS_KIND[cls]


@dataclass
class SceneObject:
    """A labeled axis-aligned box. `center` and `half_extents` are meters, world frame."""

    id: str
    cls: ObjectClass
    center: np.ndarray
    half_extents: np.ndarray
    contents: float | None = None

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float)
        self.half_extents = np.asarray(self.half_extents, dtype=float)

    @property
    def kind(self) -> ContainerKind:
        return classify_object(self.cls)

    @property
    def graspable(self) -> bool:
        return self.kind in GRASPABLE_KINDS

    @property
    def aabb_min(self) -> np.ndarray:
        return self.center - self.half_extents

    @property
    def aabb_max(self) -> np.ndarray:
        return self.center + self.half_extents

    @property
    def top_z(self) -> float:
        return float(self.center[2] + self.half_extents[2])

    def contains(self, point: np.ndarray, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(point - self.center) <= self.half_extents + tol))

    def corners(self) -> np.ndarray:
        """All 8 box corners, shape (8, 3)."""
        signs = np.array(
            [[sx, sy, sz] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)],
            dtype=float,
        )
        return self.center + signs * self.half_extents

    def surface_distance(self, point: np.ndarray) -> float:
        """Distance from a point to the box surface (inside points use nearest face)."""
        d = np.abs(point - self.center) - self.half_extents
        if np.any(d > 0):
            return float(np.linalg.norm(np.maximum(d, 0.0)))
        return float(-np.max(d))


@dataclass
class Scene:
    objects: list[SceneObject]
    table_height: float
    _by_id: dict[str, SceneObject] = field(init=False, repr=False)

    def __post_init__(self):
        self._by_id = {obj.id: obj for obj in self.objects}

    def get(self, object_id: str) -> SceneObject:
        try:
            return self._by_id[object_id]
        except KeyError:
            raise SceneError(f"unknown object id {object_id!r}") from None

    def __contains__(self, object_id: str) -> bool:
        return object_id in self._by_id

    @property
    def table(self) -> SceneObject:
        return next(o for o in self.objects if o.cls is ObjectClass.TABLE)


def _require(doc: dict, key: str, ctx: str):
    if key not in doc:
        raise SceneError(f"{ctx}: missing field {key!r}")
    return doc[key]


def _vec3(value, ctx: str) -> np.ndarray:
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise SceneError(f"{ctx}: expected 3 numbers")
    try:
        return np.array([float(v) for v in value])
    except (TypeError, ValueError):
        raise SceneError(f"{ctx}: expected 3 numbers") from None


def scene_from_dict(doc: dict) -> Scene:
    """Build and validate a Scene from a parsed scene document."""
    if not isinstance(doc, dict):
        raise SceneError("scene document must be an object")
    table_height = _require(doc, "table_height", "scene")
    if not isinstance(table_height, (int, float)) or isinstance(table_height, bool):
        raise SceneError("table_height: expected a number")
    raw_objects = _require(doc, "objects", "scene")
    if not isinstance(raw_objects, list):
        raise SceneError("objects: expected a list")

    objects: list[SceneObject] = []
    seen: set[str] = set()
    for i, entry in enumerate(raw_objects):
        ctx = f"objects[{i}]"
        if not isinstance(entry, dict):
            raise SceneError(f"{ctx}: expected an object")
        obj_id = _require(entry, "id", ctx)
        if not isinstance(obj_id, str) or not obj_id:
            raise SceneError(f"{ctx}.id: expected a non-empty string")
        if obj_id in seen:
            raise SceneError(f"{ctx}.id: duplicate id {obj_id!r}")
        seen.add(obj_id)
        cls_name = _require(entry, "class", ctx)
        try:
            cls = ObjectClass(cls_name)
        except ValueError:
            valid = ", ".join(c.value for c in ObjectClass)
            raise SceneError(f"{ctx}.class: {cls_name!r} is not one of {valid}") from None
        center = _vec3(_require(entry, "center", ctx), f"{ctx}.center")
        half = _vec3(_require(entry, "half_extents", ctx), f"{ctx}.half_extents")
        if np.any(half <= 0):
            raise SceneError(f"{ctx}.half_extents: must be strictly positive")
        contents = entry.get("contents")
        kind = classify_object(cls)
        if kind in CONTAINER_KINDS:
            if contents is None:
                raise SceneError(f"{ctx}.contents: required for {kind.value} objects")
            if not isinstance(contents, (int, float)) or isinstance(contents, bool):
                raise SceneError(f"{ctx}.contents: expected a number")
            if not 0.0 <= contents <= 1.0:
                raise SceneError(f"{ctx}.contents: must be in [0, 1]")
            contents = float(contents)
        elif contents is not None:
            raise SceneError(f"{ctx}.contents: must be null for {kind.value} objects")
        objects.append(SceneObject(obj_id, cls, center, half, contents))

    tables = [o for o in objects if o.cls is ObjectClass.TABLE]
    if len(tables) != 1:
        raise SceneError(f"scene must contain exactly one Table object, found {len(tables)}")
    return Scene(objects, float(table_height))


def scene_to_dict(scene: Scene) -> dict:
    return {
        "table_height": scene.table_height,
        "objects": [
            {
                "id": o.id,
                "class": o.cls.value,
                "center": [float(v) for v in o.center],
                "half_extents": [float(v) for v in o.half_extents],
                "contents": o.contents,
            }
            for o in scene.objects
        ],
    }


def load_scene(path: str | Path) -> Scene:
    """Load and validate a scene file (see scene_from_dict for the schema)."""
    with open(path, encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as exc:
            raise SceneError(f"{path}: invalid JSON ({exc})") from None
    return scene_from_dict(doc)
