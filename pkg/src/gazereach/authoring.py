"""Scripted gaze-trace authoring by closed-loop co-simulation.

A gaze script runs an actual session and decides each tick's sample from the
live state: fixate the target's intent zone until a plan is accepted, look at
a neutral point while the arm executes, repeat. Recording those samples
yields a trace whose replay reproduces the session exactly, whatever the
execution timing turns out to be (including injected grasp failures).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import SessionConfig
from .gaze import GazeSample, cast_gaze_ray, intersect_scene, project_bbox, quat_from_matrix
from .intent import intent_zone
from .session import Session


class AuthoringError(RuntimeError):
    """The gaze script could not drive the session as intended."""


@dataclass(frozen=True)
class TaskSpec:
    grasp: str
    dest: str
    pour: str | None = None


# The six dining-table task combinations. Table drops precede bowl drops for
# each fruit so the object is still reachable by ray when grasped again.
SIX_TASKS: tuple[TaskSpec, ...] = (
    TaskSpec("orange", "table"),
    TaskSpec("orange", "bowl"),
    TaskSpec("apple", "table"),
    TaskSpec("apple", "bowl"),
    TaskSpec("cup", "table", pour="bowl"),
    TaskSpec("cup", "table"),
)

_GRID = (0.5, 0.4, 0.6, 0.3, 0.7, 0.2, 0.8, 0.1, 0.9)


def zone_pixel(session: Session, object_id: str) -> tuple[float, float]:
    """A pixel inside the object's intent zone whose gaze ray resolves to it."""
    obj = session.scene.get(object_id)
    bbox = project_bbox(session.camera, obj)
    if bbox is None:
        raise AuthoringError(f"{object_id} does not project into the image")
    zone = intent_zone(bbox, session.config.intent)
    for fv in _GRID:
        for fu in _GRID:
            u = zone.x + fu * zone.w
            v = zone.y + fv * zone.h
            if not session.camera.in_bounds(u, v):
                continue
            hit = intersect_scene(cast_gaze_ray(session.camera, u, v), session.scene)
            if hit is not None and hit.object_id == object_id:
                return u, v
    raise AuthoringError(f"no pixel in {object_id}'s intent zone resolves to it")


def neutral_pixel(session: Session) -> tuple[float, float]:
    """A resting pixel that sits in nobody's intent zone."""
    cam = session.camera
    zones = []
    for obj in session.scene.objects:
        bbox = project_bbox(cam, obj)
        if bbox is not None:
            zones.append(intent_zone(bbox, session.config.intent))
    for fu, fv in ((0.3, 0.85), (0.25, 0.9), (0.35, 0.75), (0.15, 0.85), (0.1, 0.95)):
        u, v = fu * cam.width, fv * cam.height
        if any(z.contains(u, v) for z in zones):
            continue
        return u, v
    raise AuthoringError("no neutral pixel found outside all intent zones")


class TraceAuthor:
    def __init__(self, config: SessionConfig, tasks: tuple[TaskSpec, ...] = SIX_TASKS):
        self.session = Session(config)
        self.tasks = tasks
        self.samples: list[GazeSample] = []
        self._neutral = neutral_pixel(self.session)

    def run(self) -> list[GazeSample]:
        for task in self.tasks:
            attempts = 0
            while self.session.hand.held_id != task.grasp:
                attempts += 1
                if attempts > 6:
                    raise AuthoringError(f"grasping {task.grasp} keeps failing")
                self._fixate_until_plan(task.grasp)
                self._wait_idle()
            if task.pour is not None:
                self._fixate_until_plan(task.pour)
                self._wait_idle()
                if self.session.hand.held_id != task.grasp:
                    raise AuthoringError(f"lost {task.grasp} during pour")
            self._fixate_until_plan(task.dest)
            self._wait_idle()
            if not self.session.hand.is_empty:
                raise AuthoringError(f"hand not empty after task {task}")
            self._neutral_gap(30)
        self._neutral_gap(30)
        return self.samples

    def _emit(self, px: tuple[float, float]):
        t = self.session.clock + self.session.config.tick_dt
        sample = GazeSample(t=t, u=px[0], v=px[1], valid=True)
        self.samples.append(sample)
        self.session.submit_gaze(sample)
        self.session.tick()

    def _fixate_until_plan(self, target: str, budget_s: float = 10.0):
        deadline = self.session.clock + budget_s
        while self.session.executor.idle:
            if self.session.clock > deadline:
                raise AuthoringError(f"fixating {target} produced no plan within {budget_s}s")
            self._emit(zone_pixel(self.session, target))

    def _wait_idle(self, budget_s: float = 120.0):
        deadline = self.session.clock + budget_s
        while not self.session.executor.idle:
            if self.session.clock > deadline:
                raise AuthoringError("execution did not finish in time")
            self._emit(self._neutral)

    def _neutral_gap(self, ticks: int):
        for _ in range(ticks):
            self._emit(self._neutral)


def look_at_quaternion(position, target, up=(0.0, 0.0, 1.0)) -> np.ndarray:
    """Camera orientation quaternion: +Z toward target, +X screen-right, +Y down."""
    position = np.asarray(position, dtype=float)
    forward = np.asarray(target, dtype=float) - position
    forward = forward / np.linalg.norm(forward)
    right = np.cross(forward, np.asarray(up, dtype=float))
    norm = np.linalg.norm(right)
    if norm < 1e-9:
        raise ValueError("camera forward axis is parallel to up")
    right = right / norm
    down = np.cross(forward, right)
    return quat_from_matrix(np.column_stack([right, down, forward]))


def build_dining_scene() -> dict:
    """The bundled five-object dining scene (meters, world frame, Z up)."""
    return {
        "table_height": 0.75,
        "objects": [
            {"id": "table", "class": "Table", "center": [0.6, 0.0, 0.375],
             "half_extents": [0.5, 0.8, 0.375], "contents": None},
            {"id": "apple", "class": "Apple", "center": [0.45, -0.35, 0.79],
             "half_extents": [0.04, 0.04, 0.04], "contents": None},
            {"id": "orange", "class": "Orange", "center": [0.45, 0.35, 0.79],
             "half_extents": [0.04, 0.04, 0.04], "contents": None},
            {"id": "cup", "class": "Cup", "center": [0.55, -0.15, 0.81],
             "half_extents": [0.035, 0.035, 0.06], "contents": 0.8},
            {"id": "bowl", "class": "Bowl", "center": [0.55, 0.18, 0.8],
             "half_extents": [0.09, 0.09, 0.05], "contents": 0.0},
        ],
    }


def build_session_config(scene_file: str = "dining_scene.json") -> dict:
    """The bundled session config: head-mounted camera over the table, right arm."""
    position = [-0.1, 0.0, 1.45]
    quaternion = look_at_quaternion(position, [0.7, 0.0, 0.75])
    return {
        "scene": scene_file,
        "camera": {
            "position": position,
            "quaternion": [float(v) for v in quaternion],
            "fx": 900.0, "fy": 900.0, "cx": 640.0, "cy": 360.0,
            "width": 1280, "height": 720,
        },
        "intent": {"zone_fraction": 1.0 / 3.0, "dwell_duration": 0.5},
        "fixation": {"dispersion_px": 25.0, "min_duration_s": 0.2, "window_s": 1.0},
        "arm": {
            "elbow": [0.0, -0.3, 1.0],
            "forearm_length": 0.3,
            "home_direction": [1.0, 0.0, 0.0],
            "approach_speed": 0.25,
            "pour_angle_deg": 120.0,
            "hover_clearance": 0.10,
            "workspace_min": [-0.5, -1.2, 0.0],
            "workspace_max": [1.5, 1.2, 2.0],
        },
        "executor": {},
        "faults": {},
        "tick_dt": 1.0 / 60.0,
        "deterministic": True,
    }


def data_dir() -> Path:
    return Path(__file__).parent / "data"


def write_bundled_data(out_dir: str | Path, tasks: tuple[TaskSpec, ...] = SIX_TASKS) -> Path:
    """Regenerate the bundled scene, config, and six-task trace files."""
    from .config import config_from_dict
    from .session import write_trace

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    scene_doc = build_dining_scene()
    config_doc = build_session_config()
    with open(out / "dining_scene.json", "w", encoding="utf-8") as f:
        json.dump(scene_doc, f, indent=2)
        f.write("\n")
    with open(out / "session_config.json", "w", encoding="utf-8") as f:
        json.dump(config_doc, f, indent=2)
        f.write("\n")
    config = config_from_dict(config_doc, out)
    author = TraceAuthor(config, tasks)
    samples = author.run()
    trace_path = out / "six_task_trace.jsonl"
    write_trace(samples, trace_path)
    return trace_path
