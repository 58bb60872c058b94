import numpy as np
import pytest

from gazereach.gaze import GazeHit
from gazereach.grammar import (
    Action,
    ActionPlan,
    ActionSymbol,
    DEFAULT_PRODUCTIONS,
    ExecutionFeedback,
    GrammarError,
    HAND_KEYS,
    HandState,
    Outcome,
    ProtocolError,
    RejectReason,
    advance_state,
    grammar_from_list,
    grammar_to_list,
    load_grammar,
    parse_action,
    validate_plan_order,
)
from gazereach.intent import IntentEvent
from gazereach.scene import ContainerKind, load_scene


@pytest.fixture(scope="module")
def scene(bundled_dir):
    return load_scene(bundled_dir / "dining_scene.json")


def intent_for(object_id):
    return IntentEvent(t=1.0, object_id=object_id, hit=GazeHit(np.zeros(3), object_id, 1.0))


# The dining grammar, cell by cell. Kept literal so a change in the
# implementation table cannot silently rewrite the expectation.
EXPECTED_TABLE = {
    ("Empty", ContainerKind.NON_CONTAINER): [Action.REACH, Action.GRASP],
    ("Empty", ContainerKind.SMALL_CONTAINER): [Action.REACH, Action.GRASP],
    ("Empty", ContainerKind.LARGE_CONTAINER): RejectReason.NO_RULE_APPLIES,
    ("Empty", ContainerKind.SURFACE): RejectReason.NO_RULE_APPLIES,
    ("HoldingNonContainer", ContainerKind.NON_CONTAINER): RejectReason.HAND_OCCUPIED,
    ("HoldingNonContainer", ContainerKind.SMALL_CONTAINER): RejectReason.NO_RULE_APPLIES,
    ("HoldingNonContainer", ContainerKind.LARGE_CONTAINER): [Action.TRANSPORT, Action.RELEASE, Action.HOME],
    ("HoldingNonContainer", ContainerKind.SURFACE): [Action.TRANSPORT, Action.RELEASE, Action.HOME],
    ("HoldingSmallContainer", ContainerKind.NON_CONTAINER): RejectReason.HAND_OCCUPIED,
    ("HoldingSmallContainer", ContainerKind.SMALL_CONTAINER): RejectReason.HAND_OCCUPIED,
    ("HoldingSmallContainer", ContainerKind.LARGE_CONTAINER): [Action.TRANSPORT, Action.POUR],
    ("HoldingSmallContainer", ContainerKind.SURFACE): [Action.TRANSPORT, Action.RELEASE, Action.HOME],
}

TARGET_BY_KIND = {
    ContainerKind.NON_CONTAINER: "orange",
    ContainerKind.SMALL_CONTAINER: "cup",
    ContainerKind.LARGE_CONTAINER: "bowl",
    ContainerKind.SURFACE: "table",
}

HAND_BY_KEY = {
    "Empty": HandState.empty(),
    "HoldingNonContainer": HandState.holding("apple", ContainerKind.NON_CONTAINER),
    "HoldingSmallContainer": HandState.holding("cup", ContainerKind.SMALL_CONTAINER),
}


class TestProductionTable:
    def test_exhaustive_enumeration(self, scene):
        assert set(DEFAULT_PRODUCTIONS) == set(EXPECTED_TABLE)
        for (hand_key, kind), expected in EXPECTED_TABLE.items():
            result = parse_action(HAND_BY_KEY[hand_key], intent_for(TARGET_BY_KIND[kind]), scene)
            if isinstance(expected, RejectReason):
                assert result is expected, (hand_key, kind)
            else:
                assert isinstance(result, ActionPlan), (hand_key, kind)
                assert [s.action for s in result.sequence] == expected

    def test_emitted_plans_satisfy_ordering(self, scene):
        for (hand_key, kind) in EXPECTED_TABLE:
            result = parse_action(HAND_BY_KEY[hand_key], intent_for(TARGET_BY_KIND[kind]), scene)
            if isinstance(result, ActionPlan):
                validate_plan_order([s.action for s in result.sequence])

    def test_targets_bound_to_intent(self, scene):
        plan = parse_action(HandState.empty(), intent_for("orange"), scene)
        assert [str(s) for s in plan.sequence] == ["reach(orange)", "grasp(orange)"]
        plan = parse_action(
            HandState.holding("cup", ContainerKind.SMALL_CONTAINER), intent_for("bowl"), scene
        )
        assert [str(s) for s in plan.sequence] == ["transport(bowl)", "pour(bowl)"]

    def test_unknown_object_rejected(self, scene):
        with pytest.raises(Exception, match="unknown object"):
            parse_action(HandState.empty(), intent_for("banana"), scene)

    def test_six_paper_tasks_golden(self, scene):
        """Each task is two (or three) successive parses; sequences must be exact."""
        combos = [("orange", "bowl"), ("orange", "table"), ("apple", "bowl"), ("apple", "table")]
        for fruit, dest in combos:
            p1 = parse_action(HandState.empty(), intent_for(fruit), scene)
            assert [s.action for s in p1.sequence] == [Action.REACH, Action.GRASP]
            holding = HandState.holding(fruit, ContainerKind.NON_CONTAINER)
            p2 = parse_action(holding, intent_for(dest), scene)
            assert [s.action for s in p2.sequence] == [Action.TRANSPORT, Action.RELEASE, Action.HOME]
        # grasp cup, pour into bowl, drop on table
        p1 = parse_action(HandState.empty(), intent_for("cup"), scene)
        assert [s.action for s in p1.sequence] == [Action.REACH, Action.GRASP]
        holding_cup = HandState.holding("cup", ContainerKind.SMALL_CONTAINER)
        p2 = parse_action(holding_cup, intent_for("bowl"), scene)
        assert [s.action for s in p2.sequence] == [Action.TRANSPORT, Action.POUR]
        p3 = parse_action(holding_cup, intent_for("table"), scene)
        assert [s.action for s in p3.sequence] == [Action.TRANSPORT, Action.RELEASE, Action.HOME]
        # grasp cup, drop on table (without pour) reuses the same two rows
        assert parse_action(HandState.empty(), intent_for("cup"), scene) is not None


class TestAdvanceState:
    def test_grasp_success_enters_holding(self, scene):
        fb = ExecutionFeedback(ActionSymbol(Action.GRASP, "orange"), Outcome.SUCCESS)
        state = advance_state(HandState.empty(), fb, scene)
        assert state == HandState.holding("orange", ContainerKind.NON_CONTAINER)

    def test_grasp_failure_stays_empty(self, scene):
        fb = ExecutionFeedback(ActionSymbol(Action.GRASP, "orange"), Outcome.FAILURE, "EmptyClose")
        assert advance_state(HandState.empty(), fb, scene) == HandState.empty()

    def test_release_empties_hand(self, scene):
        holding = HandState.holding("orange", ContainerKind.NON_CONTAINER)
        fb = ExecutionFeedback(ActionSymbol(Action.RELEASE), Outcome.SUCCESS)
        assert advance_state(holding, fb, scene) == HandState.empty()

    def test_pour_keeps_holding(self, scene):
        holding = HandState.holding("cup", ContainerKind.SMALL_CONTAINER)
        fb = ExecutionFeedback(ActionSymbol(Action.POUR, "bowl"), Outcome.SUCCESS)
        assert advance_state(holding, fb, scene) == holding

    def test_motion_actions_keep_state(self, scene):
        holding = HandState.holding("orange", ContainerKind.NON_CONTAINER)
        for symbol in (ActionSymbol(Action.REACH, "bowl"), ActionSymbol(Action.TRANSPORT, "bowl"),
                       ActionSymbol(Action.HOME)):
            fb = ExecutionFeedback(symbol, Outcome.SUCCESS)
            assert advance_state(holding, fb, scene) == holding

    def test_protocol_errors(self, scene):
        holding = HandState.holding("orange", ContainerKind.NON_CONTAINER)
        with pytest.raises(ProtocolError):
            advance_state(holding, ExecutionFeedback(ActionSymbol(Action.GRASP, "apple"), Outcome.SUCCESS), scene)
        with pytest.raises(ProtocolError):
            advance_state(HandState.empty(), ExecutionFeedback(ActionSymbol(Action.RELEASE), Outcome.SUCCESS), scene)
        with pytest.raises(ProtocolError):
            advance_state(HandState.empty(), ExecutionFeedback(ActionSymbol(Action.POUR, "bowl"), Outcome.SUCCESS), scene)

    def test_holding_only_entered_via_grasp(self, scene):
        state = HandState.empty()
        for symbol in (ActionSymbol(Action.REACH, "orange"), ActionSymbol(Action.TRANSPORT, "bowl"),
                       ActionSymbol(Action.HOME)):
            state = advance_state(state, ExecutionFeedback(symbol, Outcome.SUCCESS), scene)
            assert state.is_empty


class TestPlanOrdering:
    def test_grasp_requires_reach(self):
        with pytest.raises(GrammarError):
            validate_plan_order([Action.GRASP])
        with pytest.raises(GrammarError):
            validate_plan_order([Action.TRANSPORT, Action.GRASP])

    def test_release_requires_transport(self):
        with pytest.raises(GrammarError):
            validate_plan_order([Action.REACH, Action.RELEASE])

    def test_home_terminal_only(self):
        with pytest.raises(GrammarError):
            validate_plan_order([Action.HOME, Action.REACH])

    def test_empty_plan_rejected(self):
        with pytest.raises(GrammarError):
            validate_plan_order([])

    def test_hand_state_cannot_hold_large_container(self):
        with pytest.raises(GrammarError):
            HandState.holding("bowl", ContainerKind.LARGE_CONTAINER)


class TestGrammarFiles:
    def test_round_trip_equals_default(self):
        table = grammar_from_list(grammar_to_list(DEFAULT_PRODUCTIONS))
        assert table == DEFAULT_PRODUCTIONS

    def test_missing_cell_rejected(self):
        entries = grammar_to_list(DEFAULT_PRODUCTIONS)[:-1]
        with pytest.raises(GrammarError, match="missing cells"):
            grammar_from_list(entries)

    def test_duplicate_cell_rejected(self):
        entries = grammar_to_list(DEFAULT_PRODUCTIONS)
        entries.append(dict(entries[0]))
        with pytest.raises(GrammarError, match="duplicate"):
            grammar_from_list(entries)

    def test_bad_action_name_rejected(self):
        entries = grammar_to_list(DEFAULT_PRODUCTIONS)
        entries[0] = {"hand": "Empty", "target": "NonContainer", "plan": ["Juggle"]}
        with pytest.raises(GrammarError, match="actions must be one of"):
            grammar_from_list(entries)

    def test_plan_order_validated_at_load(self):
        entries = grammar_to_list(DEFAULT_PRODUCTIONS)
        entries[0] = {"hand": "Empty", "target": "NonContainer", "plan": ["Grasp"]}
        with pytest.raises(GrammarError, match="Grasp must immediately follow Reach"):
            grammar_from_list(entries)

    def test_load_from_file(self, tmp_path):
        import json

        path = tmp_path / "grammar.json"
        path.write_text(json.dumps(grammar_to_list(DEFAULT_PRODUCTIONS)))
        assert load_grammar(path) == DEFAULT_PRODUCTIONS

    def test_hand_keys_are_closed(self):
        assert HAND_KEYS == ("Empty", "HoldingNonContainer", "HoldingSmallContainer")
        with pytest.raises(GrammarError, match="hand"):
            grammar_from_list([{"hand": "HoldingBowl", "target": "Surface", "reject": "NoRuleApplies"}])
