"""Session configuration: one JSON document wiring every module together.

Paths inside the file are resolved relative to the file's directory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .executor import ExecutorConfig, FaultPlan, ForceSpike
from .gaze import CameraModel
from .intent import IntentConfig
from .planner import ArmConfig


class ConfigError(ValueError):
    pass


@dataclass
class FixationConfig:
    dispersion_px: float = 25.0
    min_duration_s: float = 0.2
    window_s: float = 1.0

    def __post_init__(self):
        if self.dispersion_px <= 0 or self.min_duration_s <= 0 or self.window_s <= 0:
            raise ConfigError("fixation parameters must be positive")


@dataclass
class SessionConfig:
    scene_path: Path
    camera: CameraModel
    intent: IntentConfig = field(default_factory=IntentConfig)
    fixation: FixationConfig = field(default_factory=FixationConfig)
    arm: ArmConfig = field(default_factory=ArmConfig)
    executor: ExecutorConfig = field(default_factory=ExecutorConfig)
    faults: FaultPlan = field(default_factory=FaultPlan)
    grammar_path: Path | None = None
    tick_dt: float = 1.0 / 60.0
    deterministic: bool = True


def _camera_from_dict(doc: dict) -> CameraModel:
    try:
        return CameraModel(
            position=np.asarray(doc["position"], dtype=float),
            quaternion=np.asarray(doc["quaternion"], dtype=float),
            fx=float(doc["fx"]),
            fy=float(doc["fy"]),
            cx=float(doc["cx"]),
            cy=float(doc["cy"]),
            width=int(doc["width"]),
            height=int(doc["height"]),
        )
    except KeyError as exc:
        raise ConfigError(f"camera: missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"camera: {exc}") from None


def _faults_from_dict(doc: dict) -> FaultPlan:
    faults = FaultPlan()
    spike = doc.get("force_spike")
    if spike is not None:
        try:
            faults.force_spike = ForceSpike(
                t=float(spike["t"]),
                force=np.asarray(spike["force"], dtype=float),
                torque=np.asarray(spike.get("torque", [0.0, 0.0, 0.0]), dtype=float),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"faults.force_spike: {exc}") from None
    fail_on = doc.get("grasp_fail_on", [])
    if not isinstance(fail_on, list) or not all(isinstance(x, str) for x in fail_on):
        raise ConfigError("faults.grasp_fail_on: expected a list of object ids")
    faults.grasp_fail_on = list(fail_on)
    return faults


def config_from_dict(doc: dict, base_dir: Path) -> SessionConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config document must be an object")
    if "scene" not in doc:
        raise ConfigError("missing field 'scene'")
    if "camera" not in doc:
        raise ConfigError("missing field 'camera'")
    scene_path = (base_dir / doc["scene"]).resolve()
    camera = _camera_from_dict(doc["camera"])

    try:
        intent = IntentConfig(**doc.get("intent", {}))
        fixation = FixationConfig(**doc.get("fixation", {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None

    arm_doc = dict(doc.get("arm", {}))
    for key in ("elbow", "home_direction", "workspace_min", "workspace_max"):
        if key in arm_doc:
            arm_doc[key] = np.asarray(arm_doc[key], dtype=float)
    try:
        arm = ArmConfig(**arm_doc)
        executor = ExecutorConfig(**doc.get("executor", {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None

    faults = _faults_from_dict(doc.get("faults", {}))
    grammar_path = None
    if doc.get("grammar") is not None:
        grammar_path = (base_dir / doc["grammar"]).resolve()
    tick_dt = float(doc.get("tick_dt", 1.0 / 60.0))
    if tick_dt <= 0:
        raise ConfigError("tick_dt must be positive")
    return SessionConfig(
        scene_path=scene_path,
        camera=camera,
        intent=intent,
        fixation=fixation,
        arm=arm,
        executor=executor,
        faults=faults,
        grammar_path=grammar_path,
        tick_dt=tick_dt,
        deterministic=bool(doc.get("deterministic", True)),
    )


def load_config(path: str | Path) -> SessionConfig:
    path = Path(path)
    with open(path, encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return config_from_dict(doc, path.parent)
