"""Authoritative per-tick pipeline: gaze → fixation → intent → parse → execute.

A Session owns every module's state, appends all events to its log, and is
fully deterministic: the same scene, config, and gaze inputs produce a
byte-identical event log.
"""

from __future__ import annotations

import copy
import json
import time
from collections import deque
from dataclasses import dataclass
from pathlib import Path

from . import events as ev
from .config import SessionConfig
from .events import EventLog
from .executor import Executor
from .gaze import GazeSample, cast_gaze_ray, detect_fixation, intersect_scene, project_bbox
from .grammar import (
    Action,
    DEFAULT_PRODUCTIONS,
    HandState,
    RejectReason,
    advance_state,
    load_grammar,
    parse_action,
    Outcome,
)
from .intent import IntentDecoder, intent_zone
from .scene import load_scene


class TraceError(ValueError):
    """Malformed gaze trace; message carries the line number."""


def load_trace(path: str | Path) -> list[GazeSample]:
    samples: list[GazeSample] = []
    last_t = None
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as exc:
                raise TraceError(f"line {lineno}: invalid JSON ({exc})") from None
            try:
                sample = GazeSample(
                    t=float(doc["t"]), u=float(doc["u"]), v=float(doc["v"]),
                    valid=bool(doc.get("valid", True)),
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise TraceError(f"line {lineno}: bad record ({exc})") from None
            if last_t is not None and sample.t <= last_t:
                raise TraceError(f"line {lineno}: timestamps must be strictly increasing")
            last_t = sample.t
            samples.append(sample)
    return samples


def write_trace(samples: list[GazeSample], path: str | Path):
    with open(path, "w", encoding="utf-8") as f:
        for s in samples:
            f.write(json.dumps({"t": s.t, "u": s.u, "v": s.v, "valid": s.valid},
                               separators=(",", ":")))
            f.write("\n")


def hand_state_dict(hand: HandState) -> dict:
    if hand.is_empty:
        return {"holding": None}
    return {"holding": hand.held_id, "kind": hand.held_kind.value}


class Session:
    """One simulation run: owns the scene copy, FSM state, executor, and log."""

    def __init__(self, config: SessionConfig):
        self.config = config
        self.scene = load_scene(config.scene_path)
        self.camera = config.camera
        if config.grammar_path is not None:
            self.productions = load_grammar(config.grammar_path)
        else:
            self.productions = DEFAULT_PRODUCTIONS
        # faults are consumed during the run, so each session gets its own copy
        self.executor = Executor(config.arm, config.executor, copy.deepcopy(config.faults))
        self.decoder = IntentDecoder(config.intent)
        self.hand = HandState.empty()
        self.log = EventLog()
        self.clock = 0.0
        self._window: deque[GazeSample] = deque()
        self._pending: deque[GazeSample] = deque()

    # -- inputs --------------------------------------------------------------

    def submit_gaze(self, sample: GazeSample):
        self._pending.append(sample)

    # -- per-tick pipeline -----------------------------------------------------

    def tick(self):
        dt = self.config.tick_dt
        self.clock += dt

        while self._pending:
            sample = self._pending.popleft()
            self.log.append(self.clock, ev.GAZE_SAMPLE,
                            {"t": sample.t, "u": sample.u, "v": sample.v, "valid": sample.valid})
            if sample.valid and self.camera.in_bounds(sample.u, sample.v):
                self._window.append(sample)
        horizon = self.clock - self.config.fixation.window_s
        while self._window and self._window[0].t < horizon:
            self._window.popleft()

        fixation = detect_fixation(
            list(self._window),
            self.config.fixation.dispersion_px,
            self.config.fixation.min_duration_s,
        )
        hit = None
        if fixation is not None:
            self.log.append(self.clock, ev.FIXATION, {
                "centroid": [fixation.centroid[0], fixation.centroid[1]],
                "start_t": fixation.start_t,
                "duration": fixation.duration,
                "dispersion": fixation.dispersion,
            })
            ray = cast_gaze_ray(self.camera, *fixation.centroid)
            hit = intersect_scene(ray, self.scene)

        projected = []
        for obj in self.scene.objects:
            bbox = project_bbox(self.camera, obj)
            if bbox is not None:
                projected.append((obj.id, bbox))

        intent = self.decoder.decode(fixation, projected, hit, t=self.clock)
        if intent is not None:
            accepted = self.executor.idle and self.executor.state.attachment.magnet_on
            self.log.append(self.clock, ev.INTENT, {
                "object_id": intent.object_id,
                "status": "accepted" if accepted else "ignored",
                "point": [float(v) for v in intent.hit.point],
                "ray_t": intent.hit.ray_t,
            })
            if accepted:
                result = parse_action(self.hand, intent, self.scene, self.productions)
                if isinstance(result, RejectReason):
                    self.log.append(self.clock, ev.PARSE, {
                        "object_id": intent.object_id,
                        "result": "reject",
                        "reason": result.value,
                    })
                else:
                    self.log.append(self.clock, ev.PARSE, {
                        "object_id": intent.object_id,
                        "result": "plan",
                        "symbols": [str(s) for s in result.sequence],
                    })
                    self.executor.set_plan(result)

        magnet_before = self.executor.state.attachment.magnet_on
        feedbacks = self.executor.step(self.scene, dt)
        if magnet_before and not self.executor.state.attachment.magnet_on:
            payload = dict(self.executor.last_safety or {})
            payload["magnet_on"] = False
            self.log.append(self.clock, ev.SAFETY, payload)

        for fb in feedbacks:
            payload = {"action": str(fb.completed), "outcome": fb.outcome.value.lower()}
            if fb.cause is not None:
                payload["cause"] = fb.cause
            if fb.completed.action is Action.RELEASE and fb.outcome is Outcome.SUCCESS:
                payload["destination"] = self.executor.last_release_dest
            self.log.append(self.clock, ev.FEEDBACK, payload)
            new_hand = advance_state(self.hand, fb, self.scene)
            if new_hand != self.hand:
                self.hand = new_hand
                self.log.append(self.clock, ev.STATE_CHANGE, hand_state_dict(self.hand))

        held = self.executor.state.held_object
        if (self.hand.held_id or None) != held:
            raise RuntimeError(
                f"invariant violated: grammar hand={self.hand.held_id!r} "
                f"executor held={held!r}"
            )

    # -- state for clients -----------------------------------------------------

    def snapshot(self, since_seq: int = -1) -> dict:
        state = self.executor.state
        fixation = detect_fixation(
            list(self._window),
            self.config.fixation.dispersion_px,
            self.config.fixation.min_duration_s,
        )
        fix_dict = None
        if fixation is not None:
            fix_dict = {
                "centroid": [fixation.centroid[0], fixation.centroid[1]],
                "start_t": fixation.start_t,
                "duration": fixation.duration,
                "dispersion": fixation.dispersion,
                "dwell_fraction": min(1.0, fixation.duration / self.config.intent.dwell_duration),
            }
        bboxes, zones = [], []
        for obj in self.scene.objects:
            bbox = project_bbox(self.camera, obj)
            if bbox is None:
                continue
            bboxes.append({"id": obj.id, "x": bbox.x, "y": bbox.y, "w": bbox.w, "h": bbox.h})
            zone = intent_zone(bbox, self.config.intent)
            zones.append({"id": obj.id, "x": zone.x, "y": zone.y, "w": zone.w, "h": zone.h})
        plan_dict = None
        active = state.active
        if active is not None:
            plan_dict = {
                "symbols": [str(s) for s in active.plan.sequence],
                "index": active.index,
            }
        waypoints = []
        if active is not None:
            waypoints = [
                [float(v) for v in seg.waypoint.wrist]
                for seg in active.segments[active.seg_index:]
            ]
        return {
            "type": "snapshot",
            "v": 1,
            "t": self.clock,
            "camera": {"width": self.camera.width, "height": self.camera.height},
            "wrist": [float(v) for v in state.wrist.wrist],
            "roll": state.wrist.wrist_roll,
            "hand_state": hand_state_dict(self.hand),
            "plan": plan_dict,
            "objects": [
                {
                    "id": o.id,
                    "class": o.cls.value,
                    "center": [float(v) for v in o.center],
                    "half_extents": [float(v) for v in o.half_extents],
                    "contents": o.contents,
                    "held": o.id == state.held_object,
                }
                for o in self.scene.objects
            ],
            "bboxes": bboxes,
            "intent_zones": zones,
            "fixation": fix_dict,
            "magnet_on": state.attachment.magnet_on,
            "elbow": [float(v) for v in self.config.arm.elbow],
            "waypoints": waypoints,
            "last_events": [e.to_dict() for e in self.log.since(since_seq + 1)],
        }


# -- replay -------------------------------------------------------------------


@dataclass
class TaskRecord:
    label: str
    attempts: int
    first_attempt_success: bool
    completed: bool
    actions: list[dict]
    sim_time_s: float


def build_report(log: EventLog, sim_duration: float, wall_seconds: float) -> dict:
    """Fold the event log into per-task records; Home completion closes a task."""
    tasks: list[TaskRecord] = []
    actions: list[dict] = []
    failures = 0
    start_t: float | None = None
    grasp_target: str | None = None
    pour_target: str | None = None
    destination: str | None = None

    def close(completed: bool, end_t: float):
        nonlocal actions, failures, start_t, grasp_target, pour_target, destination
        if not actions:
            return
        parts = [grasp_target or "?"]
        if pour_target is not None:
            parts.append(f"pour({pour_target})")
        if destination is not None:
            parts.append(destination)
        tasks.append(TaskRecord(
            label=" -> ".join(parts),
            attempts=1 + failures,
            first_attempt_success=completed and failures == 0,
            completed=completed,
            actions=actions,
            sim_time_s=end_t - (start_t if start_t is not None else end_t),
        ))
        actions, failures = [], 0
        start_t, grasp_target, pour_target, destination = None, None, None, None

    last_t = 0.0
    for event in log.events:
        if event.kind != ev.FEEDBACK:
            continue
        last_t = event.t
        if start_t is None:
            start_t = event.t
        actions.append(dict(event.payload))
        name = event.payload["action"]
        if event.payload["outcome"] == "failure":
            failures += 1
            continue
        if name.startswith("grasp("):
            grasp_target = name[len("grasp("):-1]
        elif name.startswith("pour("):
            pour_target = name[len("pour("):-1]
        elif name == "release":
            destination = event.payload.get("destination")
        if name == "home":
            close(True, event.t)
    close(False, last_t)

    first = sum(1 for t in tasks if t.first_attempt_success)
    return {
        "tasks": [
            {
                "label": t.label,
                "attempts": t.attempts,
                "first_attempt_success": t.first_attempt_success,
                "completed": t.completed,
                "actions": t.actions,
                "sim_time_s": t.sim_time_s,
            }
            for t in tasks
        ],
        "summary": {
            "tasks": len(tasks),
            "first_attempt_successes": first,
            "all_first_attempt": bool(tasks) and first == len(tasks),
        },
        "sim_duration_s": sim_duration,
        "wall_seconds": wall_seconds,
    }


def run_replay(
    config: SessionConfig,
    trace_path: str | Path,
    settle_timeout_s: float = 60.0,
) -> tuple[dict, Session]:
    """Drive a session from a recorded gaze trace until it settles; returns the report."""
    wall_start = time.perf_counter()
    session = Session(config)
    samples = load_trace(trace_path)
    limit = (samples[-1].t if samples else 0.0) + settle_timeout_s
    i = 0
    while True:
        t_next = session.clock + config.tick_dt
        while i < len(samples) and samples[i].t <= t_next + 1e-9:
            session.submit_gaze(samples[i])
            i += 1
        session.tick()
        if i >= len(samples):
            if session.executor.idle or not session.executor.state.attachment.magnet_on:
                break
            if session.clock > limit:
                raise RuntimeError("replay did not settle after the trace ended")
    wall = time.perf_counter() - wall_start
    return build_report(session.log, session.clock, wall), session
