import numpy as np
import pytest

from gazereach.gaze import Fixation, GazeHit, Rect
from gazereach.intent import IntentConfig, IntentDecoder, intent_zone


def fix(u, v, duration=0.6, start_t=0.0):
    return Fixation(centroid=(u, v), start_t=start_t, duration=duration, dispersion=3.0)


def hit_on(object_id, ray_t=1.0):
    return GazeHit(point=np.zeros(3), object_id=object_id, ray_t=ray_t)


class TestIntentZone:
    def test_exact_thirds(self):
        zone = intent_zone(Rect(0, 0, 300, 150), IntentConfig(zone_fraction=1 / 3))
        assert (zone.x, zone.y, zone.w, zone.h) == (200.0, 0.0, 100.0, 150.0)

    def test_non_divisible_width(self):
        zone = intent_zone(Rect(0, 0, 99, 10), IntentConfig(zone_fraction=1 / 3))
        assert zone.x == pytest.approx(66.0)
        assert zone.w == pytest.approx(33.0)
        assert (zone.y, zone.h) == (0.0, 10.0)

    def test_full_fraction_is_identity(self):
        bbox = Rect(10, 20, 30, 40)
        zone = intent_zone(bbox, IntentConfig(zone_fraction=1.0))
        assert (zone.x, zone.y, zone.w, zone.h) == (bbox.x, bbox.y, bbox.w, bbox.h)

    def test_degenerate_bbox_rejected(self):
        with pytest.raises(ValueError, match="degenerate"):
            intent_zone(Rect(0, 0, 0, 10), IntentConfig())

    def test_config_validation(self):
        with pytest.raises(ValueError):
            IntentConfig(zone_fraction=0.0)
        with pytest.raises(ValueError):
            IntentConfig(dwell_duration=0.0)


class TestDecode:
    # orange bbox x in [100, 400] -> right third starts at 300
    PROJECTED = [("orange", Rect(100, 100, 300, 150))]

    def test_dwell_in_zone_with_matching_hit_emits(self):
        decoder = IntentDecoder()
        event = decoder.decode(fix(350, 150), self.PROJECTED, hit_on("orange"), t=1.0)
        assert event is not None
        assert event.object_id == "orange"
        assert event.t == 1.0

    def test_left_two_thirds_never_emits(self):
        decoder = IntentDecoder()
        assert decoder.decode(fix(250, 150), self.PROJECTED, hit_on("orange"), t=1.0) is None

    def test_below_dwell_never_emits(self):
        decoder = IntentDecoder()
        assert decoder.decode(fix(350, 150, duration=0.3), self.PROJECTED, hit_on("orange"), t=1.0) is None

    def test_hit_mismatch_never_emits(self):
        decoder = IntentDecoder()
        assert decoder.decode(fix(350, 150), self.PROJECTED, hit_on("apple"), t=1.0) is None
        assert decoder.decode(fix(350, 150), self.PROJECTED, None, t=1.0) is None

    def test_overlap_tie_broken_by_hit(self):
        projected = [
            ("near", Rect(100, 100, 300, 150)),
            ("far", Rect(150, 100, 300, 150)),
        ]
        decoder = IntentDecoder()
        # centroid inside both right-third zones; 3D hit resolves the nearer object
        u, v = 380, 150
        assert intent_zone(projected[0][1], decoder.config).contains(u, v)
        assert intent_zone(projected[1][1], decoder.config).contains(u, v)
        event = decoder.decode(fix(u, v), projected, hit_on("near", ray_t=0.8), t=1.0)
        assert event.object_id == "near"

    def test_one_shot_per_fixation(self):
        decoder = IntentDecoder()
        events = []
        for k in range(60):
            event = decoder.decode(
                fix(350, 150, duration=0.5 + k / 60.0), self.PROJECTED, hit_on("orange"), t=k / 60.0
            )
            if event:
                events.append(event)
        assert len(events) == 1

    def test_rearms_after_breakoff(self):
        decoder = IntentDecoder()
        first = decoder.decode(fix(350, 150), self.PROJECTED, hit_on("orange"), t=1.0)
        assert first is not None
        assert decoder.decode(fix(350, 150), self.PROJECTED, hit_on("orange"), t=1.1) is None
        # fixation ends
        assert decoder.decode(None, self.PROJECTED, None, t=1.2) is None
        second = decoder.decode(fix(350, 150), self.PROJECTED, hit_on("orange"), t=1.5)
        assert second is not None

    def test_rearms_when_centroid_leaves_zone(self):
        decoder = IntentDecoder()
        assert decoder.decode(fix(350, 150), self.PROJECTED, hit_on("orange"), t=1.0) is not None
        # centroid drifts out of the zone: latch drops, but the left side never emits
        assert decoder.decode(fix(200, 150), self.PROJECTED, hit_on("orange"), t=1.1) is None
        assert decoder.decode(fix(350, 150), self.PROJECTED, hit_on("orange"), t=1.2) is not None

    def test_duration_monotonicity(self):
        # when duration is the only failing conjunct, extending the fixation flips it
        decoder = IntentDecoder()
        assert decoder.decode(fix(350, 150, duration=0.4), self.PROJECTED, hit_on("orange"), t=1.0) is None
        assert decoder.decode(fix(350, 150, duration=0.6), self.PROJECTED, hit_on("orange"), t=1.1) is not None
        # when the zone is the failing conjunct, extending changes nothing
        decoder.reset()
        assert decoder.decode(fix(150, 150, duration=0.4), self.PROJECTED, hit_on("orange"), t=1.0) is None
        assert decoder.decode(fix(150, 150, duration=5.0), self.PROJECTED, hit_on("orange"), t=1.1) is None

    def test_random_events_satisfy_all_conjuncts(self):
        rng = np.random.default_rng(9)
        config = IntentConfig()
        for _ in range(500):
            decoder = IntentDecoder(config)
            projected = []
            for i in range(int(rng.integers(1, 4))):
                x, y = rng.uniform(0, 500, size=2)
                w, h = rng.uniform(30, 200, size=2)
                projected.append((f"obj{i}", Rect(float(x), float(y), float(w), float(h))))
            u, v = rng.uniform(0, 800, size=2)
            duration = float(rng.uniform(0.1, 1.5))
            hit_id = f"obj{int(rng.integers(0, 4))}"
            hit = hit_on(hit_id) if rng.uniform() < 0.8 else None
            event = decoder.decode(fix(float(u), float(v), duration), projected, hit, t=1.0)
            if event is None:
                continue
            assert duration >= config.dwell_duration  # (a)
            zones = {oid: intent_zone(b, config) for oid, b in projected}
            assert zones[event.object_id].contains(u, v)  # (b)
            assert hit is not None and event.object_id == hit.object_id  # (c)
