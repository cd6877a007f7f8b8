"""Forward-facing perspective camera that detects point light sources.

The camera maps lights and LEDs onto a fixed 320x320 pixel plane. A source
is detected iff both its horizontal and vertical view angles are within
half the aperture (boundary inclusive); there is no occlusion test. The
pixel mapping is tangent-linear (pinhole):

    u = clamp(floor((tan(th) / tan(aperture/2) + 1) * 160), 0, 319)

with th the horizontal angle (positive to the right of the optical axis)
and v computed the same way from the vertical angle, growing downward.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .geometry import Vec3

RESOLUTION = 320  # pixels per side, fixed
_HALF = RESOLUTION // 2


@dataclass(frozen=True)
class CameraConfig:
    aperture_deg: float = 50.0
    mount_yaw_offset_deg: float = 0.0  # 0 = forward along body x

    def __post_init__(self):
        if not 0.0 < self.aperture_deg < 180.0:
            raise ValueError("aperture must be in (0, 180) degrees")

    @property
    def tan_half_aperture(self) -> float:
        return math.tan(math.radians(self.aperture_deg / 2.0))


class Detection(NamedTuple):
    u: int
    v: int
    color: tuple[int, int, int]
    source_id: str


def project_light(
    camera_position: Vec3,
    camera_yaw_deg: float,
    source_position: Vec3,
    config: CameraConfig,
) -> Optional[tuple[int, int]]:
    """Project a world-frame point onto the pixel plane, or None if out of view."""
    yaw = math.radians(camera_yaw_deg + config.mount_yaw_offset_deg)
    c = math.cos(yaw)
    s = math.sin(yaw)
    return _project(
        camera_position, c, s,
        source_position[0], source_position[1], source_position[2],
        config.tan_half_aperture,
    )


def _project(cam_pos, cos_yaw, sin_yaw, sx, sy, sz, tan_half):
    """Projection core shared with the capture loop (precomputed trig)."""
    dx = sx - cam_pos[0]
    dy = sy - cam_pos[1]
    dz = sz - cam_pos[2]
    # World -> camera frame: x forward, y left, z up.
    xc = cos_yaw * dx + sin_yaw * dy
    if xc <= 0.0:
        return None
    yc = -sin_yaw * dx + cos_yaw * dy
    # Image-plane tangents: right and down are positive.
    ty = -yc / xc
    tz = -dz / xc
    if ty < -tan_half or ty > tan_half or tz < -tan_half or tz > tan_half:
        return None
    u = int((ty / tan_half + 1.0) * _HALF)
    v = int((tz / tan_half + 1.0) * _HALF)
    if u > RESOLUTION - 1:
        u = RESOLUTION - 1
    if v > RESOLUTION - 1:
        v = RESOLUTION - 1
    return u, v
