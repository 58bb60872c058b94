import numpy as np
import pytest

from gazereach.planner import (
    ArmConfig,
    OutOfWorkspace,
    PlannerError,
    TargetTooClose,
    Waypoint,
    home_pose,
    hover_point,
    pour_waypoints,
    reach_waypoints,
    transport_waypoints,
)
from helpers import box


def arm(**overrides):
    kwargs = dict(elbow=np.array([0.0, 0.0, 1.0]), forearm_length=0.3,
                  home_direction=np.array([1.0, 0.0, 0.0]))
    kwargs.update(overrides)
    return ArmConfig(**kwargs)


def run_reach_suite(n: int, seed: int = 1234):
    """Random (elbow, target, L) triples checked against the alignment contract.

    Returns the worst-case deviations so callers can assert tolerances.
    """
    rng = np.random.default_rng(seed)
    worst_collinearity = 0.0
    worst_alignment = 1.0
    worst_final = 0.0
    for _ in range(n):
        elbow = rng.uniform(-1.0, 1.0, size=3)
        length = float(rng.uniform(0.1, 0.6))
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        target = elbow + direction * rng.uniform(length * 1.05, 3.0)
        cfg = ArmConfig(elbow=elbow, forearm_length=length,
                        home_direction=np.array([1.0, 0.0, 0.0]),
                        workspace_min=np.array([-5.0, -5.0, -5.0]),
                        workspace_max=np.array([5.0, 5.0, 5.0]))
        wps = reach_waypoints(cfg, target)
        assert len(wps) == 2
        u = (target - elbow) / np.linalg.norm(target - elbow)
        distances = []
        for wp in wps:
            worst_collinearity = max(worst_collinearity,
                                     float(np.linalg.norm(np.cross(wp.wrist - elbow, u))))
            worst_alignment = min(worst_alignment, float(wp.forearm_axis @ u))
            distances.append(float(np.linalg.norm(wp.wrist - target)))
        assert distances[0] > distances[1], "approach must be monotone"
        worst_final = max(worst_final, float(np.linalg.norm(wps[-1].wrist - target)))
    return worst_collinearity, worst_alignment, worst_final


class TestHomePose:
    def test_definition(self):
        wp = home_pose(arm())
        assert np.allclose(wp.wrist, [0.3, 0.0, 1.0])
        assert np.allclose(wp.forearm_axis, [1.0, 0.0, 0.0])
        assert wp.wrist_roll == 0.0

    def test_other_direction(self):
        wp = home_pose(arm(home_direction=np.array([0.0, 1.0, 0.0])))
        assert np.allclose(wp.wrist, [0.0, 0.3, 1.0])

    def test_forearm_horizontal(self):
        wp = home_pose(arm(home_direction=np.array([0.6, -0.8, 0.0])))
        assert wp.forearm_axis[2] == 0.0


class TestReach:
    def test_axis_aligned(self):
        wps = reach_waypoints(arm(), np.array([0.5, 0.0, 1.0]))
        assert np.allclose(wps[0].wrist, [0.3, 0.0, 1.0])
        assert np.allclose(wps[1].wrist, [0.5, 0.0, 1.0])
        for wp in wps:
            assert np.allclose(wp.forearm_axis, [1.0, 0.0, 0.0])

    def test_diagonal_closed_form(self):
        wps = reach_waypoints(arm(), np.array([0.3, 0.4, 1.0]))
        # |target - elbow| = 0.5, so the unit line direction is (0.6, 0.8, 0)
        assert np.allclose(wps[0].forearm_axis, [0.6, 0.8, 0.0], atol=1e-12)
        assert np.allclose(wps[0].wrist, [0.18, 0.24, 1.0], atol=1e-12)
        assert np.allclose(wps[1].wrist, [0.3, 0.4, 1.0], atol=1e-12)

    def test_too_close_rejected(self):
        with pytest.raises(TargetTooClose):
            reach_waypoints(arm(), np.array([0.1, 0.0, 1.0]))
        with pytest.raises(TargetTooClose):
            reach_waypoints(arm(), np.array([0.3, 0.0, 1.0]))  # boundary is exclusive

    def test_out_of_workspace_rejected(self):
        cfg = arm(workspace_min=np.array([-1.0, -1.0, 0.0]),
                  workspace_max=np.array([1.0, 1.0, 2.0]))
        with pytest.raises(OutOfWorkspace):
            reach_waypoints(cfg, np.array([1.5, 0.0, 1.0]))

    def test_random_suite_tolerances(self):
        collinearity, alignment, final = run_reach_suite(1000)
        assert collinearity <= 1e-9
        assert alignment >= 1.0 - 1e-12
        assert final <= 1e-9


class TestTransport:
    def test_hover_above_bowl(self):
        bowl = box("bowl", [0.5, 0.2, 0.8], [0.09, 0.09, 0.05])
        assert bowl.top_z == pytest.approx(0.85)
        current = home_pose(arm())
        wps = transport_waypoints(arm(), current, bowl)
        assert np.allclose(wps[-1].wrist, [0.5, 0.2, 0.95])

    def test_hover_too_close_rejected(self):
        cfg = arm(elbow=np.array([0.5, 0.2, 1.0]))
        bowl = box("bowl", [0.5, 0.2, 0.8], [0.09, 0.09, 0.05])
        # hover point (0.5, 0.2, 0.95) is 0.05 m from the elbow, inside L
        with pytest.raises(TargetTooClose):
            transport_waypoints(cfg, home_pose(cfg), bowl)

    def test_idempotent_when_already_hovering(self):
        cfg = arm()
        bowl = box("bowl", [0.5, 0.2, 0.8], [0.09, 0.09, 0.05])
        hover = hover_point(cfg, bowl)
        u = (hover - cfg.elbow) / np.linalg.norm(hover - cfg.elbow)
        current = Waypoint(hover, u, 0.0)
        wps = transport_waypoints(cfg, current, bowl)
        assert len(wps) == 1
        assert np.allclose(wps[0].wrist, hover)


class TestPour:
    def test_roll_sequence(self):
        cfg = arm(pour_angle_deg=120.0)
        hover = Waypoint(np.array([0.5, 0.2, 0.95]), np.array([1.0, 0.0, 0.0]), 0.0)
        wps = pour_waypoints(cfg, hover)
        assert [wp.wrist_roll for wp in wps] == [120.0, 120.0, 0.0]

    def test_position_invariant(self):
        cfg = arm()
        hover = Waypoint(np.array([0.5, 0.2, 0.95]), np.array([1.0, 0.0, 0.0]), 0.0)
        wps = pour_waypoints(cfg, hover)
        for wp in wps:
            assert np.array_equal(wp.wrist, hover.wrist)

    def test_zero_pour_angle_rejected_in_config(self):
        with pytest.raises(PlannerError):
            arm(pour_angle_deg=0.0)


class TestConfigValidation:
    def test_home_direction_must_be_horizontal(self):
        with pytest.raises(PlannerError, match="parallel to the ground"):
            arm(home_direction=np.array([1.0, 0.0, 0.5]))

    def test_forearm_length_positive(self):
        with pytest.raises(PlannerError):
            arm(forearm_length=0.0)

    def test_workspace_ordering(self):
        with pytest.raises(PlannerError):
            arm(workspace_min=np.array([1.0, 0.0, 0.0]), workspace_max=np.array([0.0, 1.0, 1.0]))

    def test_waypoint_axis_must_be_unit(self):
        with pytest.raises(PlannerError):
            Waypoint(np.zeros(3), np.array([1.0, 1.0, 0.0]))
