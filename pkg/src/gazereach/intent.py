"""Intent decoding: dwelling on the right-most slice of an object's bounding box.

Looking anywhere else on an object is inspection and never commits to an
action; only a sufficiently long fixation inside the intent zone, confirmed
by the 3D gaze hit resolving to the same object, emits an IntentEvent.
"""

from __future__ import annotations

from dataclasses import dataclass

from .gaze import Fixation, GazeHit, Rect


@dataclass(frozen=True)
class IntentConfig:
    zone_fraction: float = 1.0 / 3.0
    dwell_duration: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.zone_fraction <= 1.0:
            raise ValueError("zone_fraction must be in (0, 1]")
        if self.dwell_duration <= 0.0:
            raise ValueError("dwell_duration must be positive")


@dataclass(frozen=True)
class IntentEvent:
    t: float
    object_id: str
    hit: GazeHit


def intent_zone(bbox: Rect, config: IntentConfig) -> Rect:
    """Right-most `zone_fraction` of a bounding box, full height."""
    if bbox.w <= 0 or bbox.h <= 0:
        raise ValueError("degenerate bounding box")
    zone_w = bbox.w * config.zone_fraction
    return Rect(bbox.x + bbox.w - zone_w, bbox.y, zone_w, bbox.h)


class IntentDecoder:
    """Per-fixation one-shot decoder.

    After emitting an event the decoder stays latched while consecutive
    fixations keep their centroid inside the emitted object's zone; the
    fixation breaking off (no fixation, or centroid leaving the zone)
    re-arms it.
    """

    def __init__(self, config: IntentConfig | None = None):
        self.config = config or IntentConfig()
        self._latched: str | None = None

    def reset(self):
        self._latched = None

    def decode(
        self,
        fixation: Fixation | None,
        projected: list[tuple[str, Rect]],
        hit: GazeHit | None,
        t: float,
    ) -> IntentEvent | None:
        if fixation is None:
            self._latched = None
            return None
        u, v = fixation.centroid
        in_zone = {
            obj_id
            for obj_id, bbox in projected
            if intent_zone(bbox, self.config).contains(u, v)
        }
        if self._latched is not None:
            if self._latched in in_zone:
                return None
            self._latched = None
        if fixation.duration < self.config.dwell_duration:
            return None
        if hit is None or hit.object_id not in in_zone:
            return None
        self._latched = hit.object_id
        return IntentEvent(t=t, object_id=hit.object_id, hit=hit)
