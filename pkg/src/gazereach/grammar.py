"""Action grammar: the rules for combining reach/grasp/transport/pour/release.

The grammar is data: a production table keyed by (hand state kind, target
container kind). Each cell either yields an action sequence template, with
targets bound at parse time, or a rejection. The built-in dining-table
grammar is the default; an equivalent table can be loaded from a file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .intent import IntentEvent
from .scene import Scene, ContainerKind


class GrammarError(ValueError):
    """Malformed production table or unknown target object."""


class ProtocolError(RuntimeError):
    """Execution feedback that could not have been issued for the current state."""


class Action(Enum):
    REACH = "Reach"
    GRASP = "Grasp"
    TRANSPORT = "Transport"
    POUR = "Pour"
    RELEASE = "Release"
    HOME = "Home"


TARGETED_ACTIONS = frozenset({Action.REACH, Action.GRASP, Action.TRANSPORT, Action.POUR})


class RejectReason(Enum):
    HAND_OCCUPIED = "HandOccupied"
    NOTHING_TO_RELEASE = "NothingToRelease"
    NOT_GRASPABLE = "NotGraspable"
    NO_RULE_APPLIES = "NoRuleApplies"


class Outcome(Enum):
    SUCCESS = "Success"
    FAILURE = "Failure"


@dataclass(frozen=True)
class ActionSymbol:
    action: Action
    target: str | None = None

    def __post_init__(self):
        if (self.target is not None) != (self.action in TARGETED_ACTIONS):
            raise GrammarError(f"{self.action.value} target mismatch")

    def __str__(self) -> str:
        if self.target is None:
            return self.action.value.lower()
        return f"{self.action.value.lower()}({self.target})"


@dataclass(frozen=True)
class HandState:
    """Empty hand, or holding a graspable object of a known container kind."""

    held_id: str | None = None
    held_kind: ContainerKind | None = None

    @classmethod
    def empty(cls) -> "HandState":
        return cls()

    @classmethod
    def holding(cls, object_id: str, kind: ContainerKind) -> "HandState":
        if kind not in (ContainerKind.NON_CONTAINER, ContainerKind.SMALL_CONTAINER):
            raise GrammarError(f"cannot hold a {kind.value} object")
        return cls(object_id, kind)

    @property
    def is_empty(self) -> bool:
        return self.held_id is None

    @property
    def key(self) -> str:
        """Production-table row key for this hand state."""
        if self.is_empty:
            return "Empty"
        if self.held_kind is ContainerKind.NON_CONTAINER:
            return "HoldingNonContainer"
        return "HoldingSmallContainer"


HAND_KEYS = ("Empty", "HoldingNonContainer", "HoldingSmallContainer")


@dataclass(frozen=True)
class ActionPlan:
    sequence: tuple[ActionSymbol, ...]
    provoking_intent: IntentEvent

    def __post_init__(self):
        validate_plan_order([s.action for s in self.sequence])


@dataclass(frozen=True)
class ExecutionFeedback:
    completed: ActionSymbol
    outcome: Outcome
    cause: str | None = None


def validate_plan_order(actions: list[Action]):
    """Enforce sequence constraints: Grasp follows Reach, Pour/Release follow
    Transport, Home only terminal, sequence non-empty."""
    if not actions:
        raise GrammarError("plan must be non-empty")
    for i, action in enumerate(actions):
        prev = actions[i - 1] if i > 0 else None
        if action is Action.GRASP and prev is not Action.REACH:
            raise GrammarError("Grasp must immediately follow Reach")
        if action in (Action.POUR, Action.RELEASE) and prev is not Action.TRANSPORT:
            raise GrammarError(f"{action.value} must immediately follow Transport")
        if action is Action.HOME and i != len(actions) - 1:
            raise GrammarError("Home must be terminal")


# Right side of a production: an action template or a rejection.
Production = tuple[Action, ...] | RejectReason

DEFAULT_PRODUCTIONS: dict[tuple[str, ContainerKind], Production] = {
    ("Empty", ContainerKind.NON_CONTAINER): (Action.REACH, Action.GRASP),
    ("Empty", ContainerKind.SMALL_CONTAINER): (Action.REACH, Action.GRASP),
    ("Empty", ContainerKind.LARGE_CONTAINER): RejectReason.NO_RULE_APPLIES,
    ("Empty", ContainerKind.SURFACE): RejectReason.NO_RULE_APPLIES,
    ("HoldingNonContainer", ContainerKind.NON_CONTAINER): RejectReason.HAND_OCCUPIED,
    ("HoldingNonContainer", ContainerKind.SMALL_CONTAINER): RejectReason.NO_RULE_APPLIES,
    ("HoldingNonContainer", ContainerKind.LARGE_CONTAINER): (
        Action.TRANSPORT,
        Action.RELEASE,
        Action.HOME,
    ),
    ("HoldingNonContainer", ContainerKind.SURFACE): (
        Action.TRANSPORT,
        Action.RELEASE,
        Action.HOME,
    ),
    ("HoldingSmallContainer", ContainerKind.NON_CONTAINER): RejectReason.HAND_OCCUPIED,
    ("HoldingSmallContainer", ContainerKind.SMALL_CONTAINER): RejectReason.HAND_OCCUPIED,
    ("HoldingSmallContainer", ContainerKind.LARGE_CONTAINER): (Action.TRANSPORT, Action.POUR),
    ("HoldingSmallContainer", ContainerKind.SURFACE): (
        Action.TRANSPORT,
        Action.RELEASE,
        Action.HOME,
    ),
}


def _bind(template: tuple[Action, ...], target: str) -> tuple[ActionSymbol, ...]:
    return tuple(
        ActionSymbol(a, target if a in TARGETED_ACTIONS else None) for a in template
    )


def parse_action(
    state: HandState,
    intent: IntentEvent,
    scene: Scene,
    productions: dict[tuple[str, ContainerKind], Production] | None = None,
) -> ActionPlan | RejectReason:
    """Resolve (hand state, intent target) through the production table."""
    table = productions if productions is not None else DEFAULT_PRODUCTIONS
    target = scene.get(intent.object_id)
    production = table[(state.key, target.kind)]
    if isinstance(production, RejectReason):
        return production
    return ActionPlan(_bind(production, target.id), intent)


def advance_state(state: HandState, feedback: ExecutionFeedback, scene: Scene) -> HandState:
    """Fold execution feedback into the hand state."""
    action = feedback.completed.action
    if action is Action.GRASP:
        if not state.is_empty:
            raise ProtocolError("grasp feedback while already holding")
        if feedback.outcome is Outcome.SUCCESS:
            target = scene.get(feedback.completed.target)
            return HandState.holding(target.id, target.kind)
        return HandState.empty()
    if action is Action.RELEASE:
        if state.is_empty:
            raise ProtocolError("release feedback with empty hand")
        if feedback.outcome is Outcome.SUCCESS:
            return HandState.empty()
        return state
    if action is Action.POUR:
        if state.is_empty:
            raise ProtocolError("pour feedback with empty hand")
        return state
    return state


def _parse_production_entry(entry: dict, ctx: str) -> tuple[tuple[str, ContainerKind], Production]:
    hand = entry.get("hand")
    if hand not in HAND_KEYS:
        raise GrammarError(f"{ctx}.hand: expected one of {', '.join(HAND_KEYS)}")
    try:
        kind = ContainerKind(entry.get("target"))
    except ValueError:
        valid = ", ".join(k.value for k in ContainerKind)
        raise GrammarError(f"{ctx}.target: expected one of {valid}") from None
    has_plan, has_reject = "plan" in entry, "reject" in entry
    if has_plan == has_reject:
        raise GrammarError(f"{ctx}: exactly one of 'plan' or 'reject' required")
    if has_reject:
        try:
            return (hand, kind), RejectReason(entry["reject"])
        except ValueError:
            valid = ", ".join(r.value for r in RejectReason)
            raise GrammarError(f"{ctx}.reject: expected one of {valid}") from None
    raw = entry["plan"]
    if not isinstance(raw, list):
        raise GrammarError(f"{ctx}.plan: expected a list of action names")
    try:
        actions = tuple(Action(name) for name in raw)
    except ValueError:
        valid = ", ".join(a.value for a in Action)
        raise GrammarError(f"{ctx}.plan: actions must be one of {valid}") from None
    try:
        validate_plan_order(list(actions))
    except GrammarError as exc:
        raise GrammarError(f"{ctx}.plan: {exc}") from None
    return (hand, kind), actions


def grammar_from_list(entries: list) -> dict[tuple[str, ContainerKind], Production]:
    """Validate a production-table document; must cover every cell exactly once."""
    if not isinstance(entries, list):
        raise GrammarError("grammar document must be a list of productions")
    table: dict[tuple[str, ContainerKind], Production] = {}
    for i, entry in enumerate(entries):
        ctx = f"productions[{i}]"
        if not isinstance(entry, dict):
            raise GrammarError(f"{ctx}: expected an object")
        key, production = _parse_production_entry(entry, ctx)
        if key in table:
            raise GrammarError(f"{ctx}: duplicate cell ({key[0]}, {key[1].value})")
        table[key] = production
    missing = [
        (hand, kind.value)
        for hand in HAND_KEYS
        for kind in ContainerKind
        if (hand, kind) not in table
    ]
    if missing:
        raise GrammarError(f"grammar missing cells: {missing}")
    return table


def load_grammar(path: str | Path) -> dict[tuple[str, ContainerKind], Production]:
    with open(path, encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as exc:
            raise GrammarError(f"{path}: invalid JSON ({exc})") from None
    return grammar_from_list(doc)


def grammar_to_list(table: dict[tuple[str, ContainerKind], Production]) -> list[dict]:
    entries = []
    for (hand, kind), production in table.items():
        entry: dict = {"hand": hand, "target": kind.value}
        if isinstance(production, RejectReason):
            entry["reject"] = production.value
        else:
            entry["plan"] = [a.value for a in production]
        entries.append(entry)
    return entries
