"""Gaze geometry: pinhole back-projection, ray-box resolution, fixation detection.

Conventions (used everywhere): world frame is right-handed, Z up, meters.
Camera frame is +Z forward (optical axis), +X right, +Y down. Pixels have
origin top-left, +u right, +v down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scene import Scene, SceneObject


@dataclass(frozen=True)
class Rect:
    """Axis-aligned pixel rectangle, top-left anchored."""

    x: float
    y: float
    w: float
    h: float

    @property
    def x1(self) -> float:
        return self.x + self.w

    @property
    def y1(self) -> float:
        return self.y + self.h

    def contains(self, u: float, v: float) -> bool:
        return self.x <= u <= self.x1 and self.y <= v <= self.y1


def quat_rotate(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rotate vector v by unit quaternion q = (w, x, y, z)."""
    w, x, y, z = q
    u = np.array([x, y, z])
    return v + 2.0 * np.cross(u, np.cross(u, v) + w * v)


def matrix_from_quat(q: np.ndarray) -> np.ndarray:
    """Rotation matrix for a unit quaternion (w, x, y, z)."""
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def quat_from_matrix(m: np.ndarray) -> np.ndarray:
    """Unit quaternion (w, x, y, z) for a proper rotation matrix."""
    t = np.trace(m)
    if t > 0:
        s = np.sqrt(t + 1.0) * 2.0
        q = np.array(
            [0.25 * s, (m[2, 1] - m[1, 2]) / s, (m[0, 2] - m[2, 0]) / s, (m[1, 0] - m[0, 1]) / s]
        )
    else:
        i = int(np.argmax(np.diag(m)))
        j, k = (i + 1) % 3, (i + 2) % 3
        s = np.sqrt(m[i, i] - m[j, j] - m[k, k] + 1.0) * 2.0
        q = np.empty(4)
        q[0] = (m[k, j] - m[j, k]) / s
        q[1 + i] = 0.25 * s
        q[1 + j] = (m[j, i] + m[i, j]) / s
        q[1 + k] = (m[k, i] + m[i, k]) / s
    return q / np.linalg.norm(q)


@dataclass
class CameraModel:
    """Simulated head-mounted pinhole camera. Quaternion is (w, x, y, z), world frame."""

    position: np.ndarray
    quaternion: np.ndarray
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float)
        self.quaternion = np.asarray(self.quaternion, dtype=float)
        if abs(np.linalg.norm(self.quaternion) - 1.0) > 1e-9:
            raise ValueError("camera quaternion must be unit-norm")
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive")
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise ValueError("principal point must lie inside the image")
        self._rot_cw = matrix_from_quat(self.quaternion)

    def in_bounds(self, u: float, v: float) -> bool:
        return 0 <= u < self.width and 0 <= v < self.height

    def cam_to_world(self, v: np.ndarray) -> np.ndarray:
        return self._rot_cw @ v

    def world_to_cam(self, v: np.ndarray) -> np.ndarray:
        return self._rot_cw.T @ v

    def project_point(self, point_w: np.ndarray) -> tuple[float, float, float]:
        """Project a world point; returns (u, v, depth). depth <= 0 means behind camera."""
        p = self.world_to_cam(np.asarray(point_w, dtype=float) - self.position)
        z = float(p[2])
        if z <= 0:
            return float("nan"), float("nan"), z
        return self.cx + self.fx * float(p[0]) / z, self.cy + self.fy * float(p[1]) / z, z

    def project_points(self, points_w: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Vectorized projection of an (N, 3) array; returns (u, v, depth) arrays."""
        p = (np.asarray(points_w, dtype=float) - self.position) @ self._rot_cw
        z = p[:, 2]
        with np.errstate(divide="ignore", invalid="ignore"):
            u = self.cx + self.fx * p[:, 0] / z
            v = self.cy + self.fy * p[:, 1] / z
        return u, v, z


@dataclass(frozen=True)
class GazeSample:
    t: float
    u: float
    v: float
    valid: bool = True


@dataclass(frozen=True)
class Fixation:
    """A dispersion-bounded cluster of gaze samples ending at the newest sample."""

    centroid: tuple[float, float]
    start_t: float
    duration: float
    dispersion: float


@dataclass(frozen=True)
class GazeHit:
    point: np.ndarray
    object_id: str
    ray_t: float


@dataclass(frozen=True)
class Ray:
    origin: np.ndarray
    direction: np.ndarray


def cast_gaze_ray(camera: CameraModel, u: float, v: float) -> Ray:
    """Back-project a pixel through the pinhole model into a unit world-frame ray."""
    if not camera.in_bounds(u, v):
        raise ValueError(f"pixel ({u}, {v}) outside image {camera.width}x{camera.height}")
    d_cam = np.array([(u - camera.cx) / camera.fx, (v - camera.cy) / camera.fy, 1.0])
    d_world = camera.cam_to_world(d_cam)
    return Ray(camera.position.copy(), d_world / np.linalg.norm(d_world))


def ray_aabb_interval(ray: Ray, box: SceneObject) -> tuple[float, float] | None:
    """Slab-method entry/exit distances along the ray, or None on a miss."""
    t_min, t_max = -np.inf, np.inf
    for axis in range(3):
        o, d = ray.origin[axis], ray.direction[axis]
        lo = box.center[axis] - box.half_extents[axis]
        hi = box.center[axis] + box.half_extents[axis]
        if d == 0.0:
            if o < lo or o > hi:
                return None
            continue
        t0, t1 = (lo - o) / d, (hi - o) / d
        if t0 > t1:
            t0, t1 = t1, t0
        t_min = max(t_min, t0)
        t_max = min(t_max, t1)
        if t_max < t_min:
            return None
    return t_min, t_max


def intersect_scene(ray: Ray, scene: Scene) -> GazeHit | None:
    """Nearest positive ray-box hit across all scene objects, or None."""
    best: GazeHit | None = None
    for obj in scene.objects:
        interval = ray_aabb_interval(ray, obj)
        if interval is None:
            continue
        t_min, t_max = interval
        t = t_min if t_min > 0 else t_max
        if t <= 0:
            continue
        if best is None or t < best.ray_t:
            best = GazeHit(ray.origin + t * ray.direction, obj.id, t)
    return best


def detect_fixation(
    window: list[GazeSample],
    dispersion_px: float = 25.0,
    min_duration_s: float = 0.2,
) -> Fixation | None:
    """Dispersion-threshold fixation detection over a time-ordered sample window.

    Finds the longest suffix of the window whose maximum pairwise sample
    distance stays within `dispersion_px`; it qualifies as the current
    fixation when it spans at least `min_duration_s`.
    """
    if not window:
        return None
    n = len(window)
    start = n - 1
    worst = 0.0
    for i in range(n - 2, -1, -1):
        si = window[i]
        d = max(math.hypot(si.u - window[j].u, si.v - window[j].v) for j in range(i + 1, n))
        if max(worst, d) > dispersion_px:
            break
        worst = max(worst, d)
        start = i
    duration = window[-1].t - window[start].t
    if duration < min_duration_s:
        return None
    members = window[start:]
    cu = sum(s.u for s in members) / len(members)
    cv = sum(s.v for s in members) / len(members)
    return Fixation(
        centroid=(cu, cv),
        start_t=window[start].t,
        duration=duration,
        dispersion=worst,
    )


def project_bbox(camera: CameraModel, obj: SceneObject) -> Rect | None:
    """Project an object's box corners into an image-clipped bounding rectangle.

    Returns None when every corner is behind the camera or the rectangle falls
    fully outside the image.
    """
    u, v, z = camera.project_points(obj.corners())
    front = z > 1e-9
    if not np.any(front):
        return None
    u, v = u[front], v[front]
    x0 = max(0.0, float(u.min()))
    y0 = max(0.0, float(v.min()))
    x1 = min(float(camera.width), float(u.max()))
    y1 = min(float(camera.height), float(v.max()))
    if x1 <= x0 or y1 <= y0:
        return None
    return Rect(x0, y0, x1 - x0, y1 - y0)
