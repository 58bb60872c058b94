"""Elbow-constrained waypoint planning for reach, transport, pour, and home.

The arm is modeled by a fixed elbow and a forearm of length L. A reach first
aligns the forearm with the elbow-target line at forearm length, then slides
the wrist along that line onto the target, so the arm only ever moves over
the elbow-target line.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .scene import SceneObject


class PlannerError(ValueError):
    pass


class TargetTooClose(PlannerError):
    """Target inside the forearm-length sphere around the elbow."""


class OutOfWorkspace(PlannerError):
    """Target outside the configured reachable bounds."""


@dataclass(frozen=True)
class Waypoint:
    wrist: np.ndarray
    forearm_axis: np.ndarray
    wrist_roll: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "wrist", np.asarray(self.wrist, dtype=float))
        axis = np.asarray(self.forearm_axis, dtype=float)
        if abs(np.linalg.norm(axis) - 1.0) > 1e-12:
            raise PlannerError("forearm_axis must be unit-norm")
        object.__setattr__(self, "forearm_axis", axis)


@dataclass
class ArmConfig:
    elbow: np.ndarray = field(default_factory=lambda: np.array([0.0, -0.3, 1.0]))
    forearm_length: float = 0.3
    home_direction: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0]))
    approach_speed: float = 0.25
    pour_angle_deg: float = 120.0
    hover_clearance: float = 0.10
    workspace_min: np.ndarray = field(default_factory=lambda: np.array([-1.5, -1.5, 0.0]))
    workspace_max: np.ndarray = field(default_factory=lambda: np.array([1.5, 1.5, 2.0]))

    def __post_init__(self):
        self.elbow = np.asarray(self.elbow, dtype=float)
        self.home_direction = np.asarray(self.home_direction, dtype=float)
        self.workspace_min = np.asarray(self.workspace_min, dtype=float)
        self.workspace_max = np.asarray(self.workspace_max, dtype=float)
        if self.forearm_length <= 0:
            raise PlannerError("forearm_length must be positive")
        norm = np.linalg.norm(self.home_direction)
        if norm < 1e-12:
            raise PlannerError("home_direction must be non-zero")
        self.home_direction = self.home_direction / norm
        if abs(self.home_direction[2]) > 1e-12:
            raise PlannerError("home_direction must be parallel to the ground plane")
        if not 0.0 < self.pour_angle_deg <= 180.0:
            raise PlannerError("pour_angle_deg must be in (0, 180]")
        if self.approach_speed <= 0:
            raise PlannerError("approach_speed must be positive")
        if self.hover_clearance < 0:
            raise PlannerError("hover_clearance must be non-negative")
        if np.any(self.workspace_min >= self.workspace_max):
            raise PlannerError("workspace bounds must satisfy min < max per axis")

    def in_workspace(self, point: np.ndarray) -> bool:
        return bool(np.all(point >= self.workspace_min) and np.all(point <= self.workspace_max))


def home_pose(cfg: ArmConfig) -> Waypoint:
    """Rest pose: forearm horizontal along the configured home direction."""
    return Waypoint(cfg.elbow + cfg.forearm_length * cfg.home_direction, cfg.home_direction, 0.0)


def reach_waypoints(cfg: ArmConfig, target: np.ndarray) -> list[Waypoint]:
    """Two-step reach: align the forearm with the elbow-target line, then extend.

    Waypoint 1 places the wrist at forearm length along the line; waypoint 2
    slides it along the same line onto the target.
    """
    target = np.asarray(target, dtype=float)
    offset = target - cfg.elbow
    distance = float(np.linalg.norm(offset))
    if distance <= cfg.forearm_length:
        raise TargetTooClose(
            f"target {distance:.3f} m from elbow, needs > {cfg.forearm_length:.3f} m"
        )
    if not cfg.in_workspace(target):
        raise OutOfWorkspace(f"target {target.tolist()} outside workspace")
    u = offset / distance
    return [
        Waypoint(cfg.elbow + cfg.forearm_length * u, u, 0.0),
        Waypoint(target.copy(), u, 0.0),
    ]


def hover_point(cfg: ArmConfig, target_object: SceneObject) -> np.ndarray:
    """Point above the target's center from which release/pour is performed."""
    return np.array(
        [target_object.center[0], target_object.center[1], target_object.top_z + cfg.hover_clearance]
    )


def transport_waypoints(
    cfg: ArmConfig, current: Waypoint, target_object: SceneObject
) -> list[Waypoint]:
    """Carry the wrist to the hover point above a drop/pour target."""
    hover = hover_point(cfg, target_object)
    if np.linalg.norm(current.wrist - hover) <= 1e-9:
        return [Waypoint(hover, current.forearm_axis, current.wrist_roll)]
    return reach_waypoints(cfg, hover)


def pour_waypoints(cfg: ArmConfig, hover: Waypoint) -> list[Waypoint]:
    """Tilt to the pour angle, hold, and tilt back, without moving the wrist."""
    return [
        Waypoint(hover.wrist, hover.forearm_axis, cfg.pour_angle_deg),
        Waypoint(hover.wrist, hover.forearm_axis, cfg.pour_angle_deg),
        Waypoint(hover.wrist, hover.forearm_axis, 0.0),
    ]
