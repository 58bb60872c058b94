"""Shared test utilities: independent oracles and random-instance generators."""

from __future__ import annotations

import numba
import numpy as np

from gazereach.gaze import CameraModel, GazeSample, Ray
from gazereach.scene import ObjectClass, Scene, SceneObject


def identity_camera(width=640, height=480, fx=500.0, fy=500.0) -> CameraModel:
    return CameraModel(
        position=np.zeros(3),
        quaternion=np.array([1.0, 0.0, 0.0, 0.0]),
        fx=fx, fy=fy, cx=width / 2.0, cy=height / 2.0,
        width=width, height=height,
    )


def box(obj_id: str, center, half_extents, cls=ObjectClass.APPLE, contents=None) -> SceneObject:
    return SceneObject(obj_id, cls, np.asarray(center, float), np.asarray(half_extents, float), contents)


def boxes_scene(objects: list[SceneObject], table_height: float = 0.0) -> Scene:
    return Scene(objects, table_height)


@numba.njit(cache=True)
def _march(origin, direction, centers, halfs, t_max, step):
    n_steps = int(t_max / step)
    n_boxes = centers.shape[0]
    for k in range(1, n_steps):
        t = k * step
        px = origin[0] + t * direction[0]
        py = origin[1] + t * direction[1]
        pz = origin[2] + t * direction[2]
        for b in range(n_boxes):
            if (
                abs(px - centers[b, 0]) <= halfs[b, 0]
                and abs(py - centers[b, 1]) <= halfs[b, 1]
                and abs(pz - centers[b, 2]) <= halfs[b, 2]
            ):
                return b
    return -1


def ray_march_first_object(ray: Ray, scene: Scene, t_max: float, step: float = 1e-4) -> str | None:
    """Brute-force oracle: march along the ray and report the first box entered.

    Deliberately independent of the slab intersection code: it samples points
    at fixed 1e-4 m intervals and asks plain containment per box.
    """
    centers = np.ascontiguousarray([o.center for o in scene.objects])
    halfs = np.ascontiguousarray([o.half_extents for o in scene.objects])
    idx = _march(
        np.ascontiguousarray(ray.origin), np.ascontiguousarray(ray.direction),
        centers, halfs, t_max, step,
    )
    return scene.objects[idx].id if idx >= 0 else None


def random_disjoint_scene(rng: np.random.Generator, n_boxes: int = 4) -> Scene:
    """Boxes with pairwise-disjoint AABBs inside [-1, 1]^3 (rejection sampled)."""
    objects: list[SceneObject] = []
    while len(objects) < n_boxes:
        center = rng.uniform(-0.8, 0.8, size=3)
        half = rng.uniform(0.05, 0.25, size=3)
        candidate = box(f"box{len(objects)}", center, half)
        overlaps = any(
            np.all(np.abs(candidate.center - other.center) < candidate.half_extents + other.half_extents)
            for other in objects
        )
        if not overlaps:
            objects.append(candidate)
    return boxes_scene(objects)


def random_outside_ray(rng: np.random.Generator, scene: Scene | None = None) -> Ray:
    """Ray starting outside every box (origin radius 2.5), usually aimed at one."""
    direction = rng.normal(size=3)
    direction /= np.linalg.norm(direction)
    origin = -2.5 * direction + rng.uniform(-0.2, 0.2, size=3)
    if scene is not None and rng.uniform() < 0.8:
        target = scene.objects[int(rng.integers(len(scene.objects)))]
        aim = target.center + rng.uniform(-1.2, 1.2, size=3) * target.half_extents
    else:
        aim = rng.uniform(-0.8, 0.8, size=3)
    d = aim - origin
    return Ray(origin, d / np.linalg.norm(d))


def steady_window(u: float, v: float, n: int, duration: float, t0: float = 0.0,
                  jitter: float = 0.0, rng: np.random.Generator | None = None) -> list[GazeSample]:
    """n samples spanning exactly `duration` seconds at (u, v) with optional jitter."""
    samples = []
    for i in range(n):
        t = t0 + duration * i / (n - 1) if n > 1 else t0
        du = dv = 0.0
        if jitter and rng is not None:
            du, dv = rng.uniform(-jitter, jitter, size=2)
        samples.append(GazeSample(t=t, u=u + du, v=v + dv))
    return samples
