"""Tick-driven execution of action plans on a simulated arm, glove, and magnet.

The wrist tracks waypoints at a bounded speed, the glove is a rate-limited
flexion actuator whose stall behavior drives grasp-success inference, and
drop/pour are discrete scene edits. An electromagnet between user and arm
releases (and freezes all motion) whenever force/torque readings exceed the
configured limits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .grammar import Action, ActionPlan, ActionSymbol, ExecutionFeedback, Outcome
from .planner import ArmConfig, Waypoint, home_pose, pour_waypoints, reach_waypoints, transport_waypoints, PlannerError
from .scene import ContainerKind, Scene, SceneObject


class ExecutorError(RuntimeError):
    pass


class MotionInhibited(ExecutorError):
    """Arm motion commanded while the safety magnet is released."""


class NothingToRelease(ExecutorError):
    pass


class GraspPreconditionError(ExecutorError):
    """Grasp attempted outside grasp radius; reach must precede grasp."""


class GloveCommand(Enum):
    OPEN = "Open"
    CLOSE = "Close"


class SafetyStatus(Enum):
    NOMINAL = "Nominal"
    RELEASE = "Release"


@dataclass
class GloveState:
    commanded: GloveCommand = GloveCommand.OPEN
    flexion: float = 0.0
    tendon_force: float = 0.0
    flexion_rate: float = 0.0


@dataclass
class AttachmentState:
    magnet_on: bool = True
    force: np.ndarray = field(default_factory=lambda: np.zeros(3))
    torque: np.ndarray = field(default_factory=lambda: np.zeros(3))


@dataclass(frozen=True)
class GraspOutcome:
    success: bool
    cause: str | None = None  # "EmptyClose" | "InsufficientForce"


@dataclass
class ExecutorConfig:
    force_limit: float = 50.0
    torque_limit: float = 5.0
    min_grasp_force: float = 3.0
    full_close_threshold: float = 0.95
    stall_rate: float = 0.01
    grasp_radius: float = 0.05
    glove_close_rate: float = 1.0
    glove_open_epsilon: float = 0.05
    contact_flexion: float = 0.55
    contact_force: float = 8.0
    roll_rate_deg: float = 180.0
    pour_hold_s: float = 1.0
    waypoint_tol: float = 1e-6


@dataclass
class ForceSpike:
    t: float
    force: np.ndarray
    torque: np.ndarray = field(default_factory=lambda: np.zeros(3))
    fired: bool = False


@dataclass
class FaultPlan:
    """Deterministic fault injections: a one-tick FT spike and one-shot grasp failures."""

    force_spike: ForceSpike | None = None
    grasp_fail_on: list[str] = field(default_factory=list)


@dataclass
class _Segment:
    waypoint: Waypoint
    dwell_s: float = 0.0
    effect: str | None = None  # "pour" fires the content transfer on completion


@dataclass
class _ActivePlan:
    plan: ActionPlan
    index: int = 0
    segments: list[_Segment] = field(default_factory=list)
    seg_index: int = 0
    started: bool = False
    faulted_grasp: bool = False

    @property
    def current(self) -> ActionSymbol:
        return self.plan.sequence[self.index]


@dataclass
class ExecutorState:
    wrist: Waypoint
    active: _ActivePlan | None = None
    held_object: str | None = None
    carry_offset: np.ndarray = field(default_factory=lambda: np.zeros(3))
    glove: GloveState = field(default_factory=GloveState)
    attachment: AttachmentState = field(default_factory=AttachmentState)
    clock: float = 0.0


def safety_check(attachment: AttachmentState, cfg: ExecutorConfig) -> SafetyStatus:
    """Release whenever the force or torque magnitude exceeds its limit."""
    if float(np.linalg.norm(attachment.force)) > cfg.force_limit:
        return SafetyStatus.RELEASE
    if float(np.linalg.norm(attachment.torque)) > cfg.torque_limit:
        return SafetyStatus.RELEASE
    return SafetyStatus.NOMINAL


def execute_grasp(state: ExecutorState, target: SceneObject, cfg: ExecutorConfig) -> GraspOutcome | None:
    """Infer grasp outcome from glove motor/sensor data; None while still closing.

    A stall short of full close under adequate tendon force means the glove
    closed onto something; reaching full close means it closed on air.
    """
    if target.surface_distance(state.wrist.wrist) > cfg.grasp_radius:
        raise GraspPreconditionError(
            f"wrist {target.surface_distance(state.wrist.wrist):.3f} m from {target.id}, "
            f"grasp radius is {cfg.grasp_radius:.3f} m"
        )
    glove = state.glove
    if glove.flexion >= cfg.full_close_threshold:
        return GraspOutcome(False, "EmptyClose")
    if abs(glove.flexion_rate) < cfg.stall_rate:
        if glove.tendon_force >= cfg.min_grasp_force:
            return GraspOutcome(True)
        return GraspOutcome(False, "InsufficientForce")
    return None


def apply_release(state: ExecutorState, scene: Scene) -> str:
    """Drop the held object into the container under the wrist, or onto the table.

    Returns the id of the destination object. The held object's box is moved
    in place; no dynamics are simulated.
    """
    if state.held_object is None:
        raise NothingToRelease("release with empty hand")
    obj = scene.get(state.held_object)
    wrist = state.wrist.wrist
    dest = None
    for cand in scene.objects:
        if cand.kind is not ContainerKind.LARGE_CONTAINER or cand.id == obj.id:
            continue
        dx = abs(wrist[0] - cand.center[0]) <= cand.half_extents[0]
        dy = abs(wrist[1] - cand.center[1]) <= cand.half_extents[1]
        if dx and dy and wrist[2] >= cand.top_z:
            if dest is None or cand.top_z > dest.top_z:
                dest = cand
    if dest is not None:
        obj.center = dest.center.copy()
    else:
        dest = scene.table
        obj.center = np.array([wrist[0], wrist[1], scene.table_height + obj.half_extents[2]])
    state.held_object = None
    state.glove.commanded = GloveCommand.OPEN
    return dest.id


def apply_pour(source: SceneObject, dest: SceneObject):
    """Transfer the source's contents into the destination, clamped at full."""
    if dest.kind is not ContainerKind.LARGE_CONTAINER:
        raise ExecutorError(f"pour destination {dest.id} is not a large container")
    if source.contents is None:
        raise ExecutorError(f"pour source {source.id} has no contents")
    dest.contents = min(1.0, float(dest.contents) + float(source.contents))
    source.contents = 0.0


class Executor:
    """Owns the executor state and advances it one tick at a time."""

    def __init__(self, arm: ArmConfig, cfg: ExecutorConfig | None = None, faults: FaultPlan | None = None):
        self.arm = arm
        self.cfg = cfg or ExecutorConfig()
        self.faults = faults or FaultPlan()
        self.state = ExecutorState(wrist=home_pose(arm))
        self.last_safety: dict | None = None
        self.last_release_dest: str | None = None

    # -- commands ----------------------------------------------------------

    def set_plan(self, plan: ActionPlan):
        if not self.state.attachment.magnet_on:
            raise MotionInhibited("magnet released; motion commands inhibited")
        if self.state.active is not None:
            raise ExecutorError("a plan is already executing")
        self.state.active = _ActivePlan(plan)

    @property
    def idle(self) -> bool:
        return self.state.active is None

    # -- tick --------------------------------------------------------------

    def step(self, scene: Scene, dt: float) -> list[ExecutionFeedback]:
        """Advance one tick; returns feedback for every action completed this tick."""
        if dt <= 0:
            raise ExecutorError("dt must be positive")
        state = self.state
        state.clock += dt
        if not state.attachment.magnet_on:
            return []  # released: everything frozen until reset

        self._apply_faults()
        if safety_check(state.attachment, self.cfg) is SafetyStatus.RELEASE:
            state.attachment.magnet_on = False
            state.active = None
            self.last_safety = {
                "force": [float(v) for v in state.attachment.force],
                "torque": [float(v) for v in state.attachment.torque],
            }
            return []

        feedback: list[ExecutionFeedback] = []
        if state.active is None:
            self._update_glove(dt, contact=False)
        else:
            feedback = self._advance_plan(scene, dt)
        if state.held_object is not None:
            scene.get(state.held_object).center = state.wrist.wrist + state.carry_offset
        return feedback

    # -- internals ----------------------------------------------------------

    def _apply_faults(self):
        spike = self.faults.force_spike
        att = self.state.attachment
        if spike is not None and not spike.fired and self.state.clock >= spike.t:
            att.force = np.asarray(spike.force, dtype=float)
            att.torque = np.asarray(spike.torque, dtype=float)
            spike.fired = True
        else:
            att.force = np.zeros(3)
            att.torque = np.zeros(3)

    def _update_glove(self, dt: float, contact: bool):
        glove = self.state.glove
        prev = glove.flexion
        max_step = self.cfg.glove_close_rate * dt
        if glove.commanded is GloveCommand.CLOSE:
            cap = self.cfg.contact_flexion if contact else 1.0
            delta = cap - glove.flexion
            glove.flexion += max(-max_step, min(max_step, delta))
            stalled_on_object = contact and abs(glove.flexion - self.cfg.contact_flexion) < 1e-12
            glove.tendon_force = self.cfg.contact_force if stalled_on_object else 0.0
        else:
            glove.flexion = max(0.0, glove.flexion - max_step)
            glove.tendon_force = 0.0
        glove.flexion_rate = (glove.flexion - prev) / dt

    def _begin_symbol(self, scene: Scene, active: _ActivePlan) -> ExecutionFeedback | None:
        """Set up segments/glove for the current symbol; a planner error fails it."""
        symbol = active.current
        active.seg_index = 0
        active.started = True
        try:
            if symbol.action is Action.REACH:
                target = scene.get(symbol.target)
                wps = reach_waypoints(self.arm, target.center)
                active.segments = [_Segment(wp) for wp in wps]
            elif symbol.action is Action.TRANSPORT:
                target = scene.get(symbol.target)
                wps = transport_waypoints(self.arm, self.state.wrist, target)
                active.segments = [_Segment(wp) for wp in wps]
            elif symbol.action is Action.HOME:
                active.segments = [_Segment(home_pose(self.arm))]
            elif symbol.action is Action.POUR:
                wps = pour_waypoints(self.arm, self.state.wrist)
                active.segments = [
                    _Segment(wps[0]),
                    _Segment(wps[1], dwell_s=self.cfg.pour_hold_s, effect="pour"),
                    _Segment(wps[2]),
                ]
            elif symbol.action is Action.GRASP:
                active.segments = []
                active.faulted_grasp = symbol.target in self.faults.grasp_fail_on
                if active.faulted_grasp:
                    self.faults.grasp_fail_on.remove(symbol.target)
                self.state.glove.commanded = GloveCommand.CLOSE
            elif symbol.action is Action.RELEASE:
                active.segments = []
                self.state.glove.commanded = GloveCommand.OPEN
        except PlannerError as exc:
            self.state.active = None
            return ExecutionFeedback(symbol, Outcome.FAILURE, cause=str(exc))
        return None

    def _advance_plan(self, scene: Scene, dt: float) -> list[ExecutionFeedback]:
        active = self.state.active
        symbol = active.current
        if not active.started:
            failure = self._begin_symbol(scene, active)
            if failure is not None:
                self._update_glove(dt, contact=False)
                return [failure]
            symbol = active.current

        if symbol.action is Action.GRASP:
            return self._tick_grasp(scene, active, dt)
        if symbol.action is Action.RELEASE:
            return self._tick_release(scene, active, dt)
        self._update_glove(dt, contact=False)
        self._tick_motion(scene, active, dt)
        if active.seg_index >= len(active.segments):
            return self._complete_symbol(active)
        return []

    def _tick_motion(self, scene: Scene, active: _ActivePlan, dt: float):
        seg = active.segments[active.seg_index]
        wp = seg.waypoint
        wrist = self.state.wrist
        delta = wp.wrist - wrist.wrist
        dist = float(np.linalg.norm(delta))
        if dist > self.cfg.waypoint_tol:
            step_len = self.arm.approach_speed * dt
            if step_len >= dist:
                new_pos = wp.wrist.copy()
            else:
                new_pos = wrist.wrist + delta * (step_len / dist)
            self.state.wrist = Waypoint(new_pos, self._axis_for(new_pos, wp), wrist.wrist_roll)
            return
        if abs(wp.wrist_roll - wrist.wrist_roll) > 1e-9:
            max_step = self.cfg.roll_rate_deg * dt
            diff = wp.wrist_roll - wrist.wrist_roll
            roll = wp.wrist_roll if abs(diff) <= max_step else wrist.wrist_roll + np.sign(diff) * max_step
            self.state.wrist = Waypoint(wp.wrist.copy(), wp.forearm_axis, float(roll))
            return
        if seg.dwell_s > 0:
            seg.dwell_s -= dt
            if seg.dwell_s > 0:
                return
        if seg.effect == "pour":
            apply_pour(scene.get(self.state.held_object), scene.get(active.current.target))
        active.seg_index += 1

    def _axis_for(self, wrist_pos: np.ndarray, wp: Waypoint) -> np.ndarray:
        offset = wrist_pos - self.arm.elbow
        norm = float(np.linalg.norm(offset))
        if norm < 1e-9:
            return wp.forearm_axis
        return offset / norm

    def _tick_grasp(self, scene: Scene, active: _ActivePlan, dt: float) -> list[ExecutionFeedback]:
        target = scene.get(active.current.target)
        contact = (
            not active.faulted_grasp
            and target.surface_distance(self.state.wrist.wrist) <= self.cfg.grasp_radius
        )
        self._update_glove(dt, contact=contact)
        outcome = execute_grasp(self.state, target, self.cfg)
        if outcome is None:
            return []
        if outcome.success:
            self.state.held_object = target.id
            self.state.carry_offset = target.center - self.state.wrist.wrist
            return self._complete_symbol(active)
        # failed grasp aborts the plan; the glove re-opens and a retry needs a new intent
        self.state.active = None
        self.state.glove.commanded = GloveCommand.OPEN
        return [ExecutionFeedback(active.current, Outcome.FAILURE, cause=outcome.cause)]

    def _tick_release(self, scene: Scene, active: _ActivePlan, dt: float) -> list[ExecutionFeedback]:
        self._update_glove(dt, contact=False)
        if self.state.glove.flexion > self.cfg.glove_open_epsilon:
            return []
        self.last_release_dest = apply_release(self.state, scene)
        return self._complete_symbol(active)

    def _complete_symbol(self, active: _ActivePlan) -> list[ExecutionFeedback]:
        done = ExecutionFeedback(active.current, Outcome.SUCCESS)
        active.index += 1
        active.started = False
        active.segments = []
        if active.index >= len(active.plan.sequence):
            self.state.active = None
        return [done]
