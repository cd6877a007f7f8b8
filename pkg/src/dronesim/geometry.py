"""Small 3D vector and angle helpers shared by the controllers and sensors.

Vectors are plain ``(x, y, z)`` float tuples; yaw angles are degrees with the
convention that positive yaw rotates counter-clockwise about +z (seen from
above) and the wrapped range is (-180, 180].
"""

from __future__ import annotations

import math

Vec3 = tuple[float, float, float]

ZERO3: Vec3 = (0.0, 0.0, 0.0)


def wrap_deg(angle: float) -> float:
    """Wrap an angle in degrees to (-180, 180].

    Exact identity for angles already in range (no round-off drift).
    """
    if -180.0 < angle <= 180.0:
        return angle
    r = math.fmod(angle + 180.0, 360.0)
    if r <= 0.0:
        r += 360.0
    return r - 180.0


def norm(v: Vec3) -> float:
    return math.sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])


def sub(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def add(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def scale(v: Vec3, s: float) -> Vec3:
    return (v[0] * s, v[1] * s, v[2] * s)


def body_to_world(v: Vec3, yaw_deg: float) -> Vec3:
    """Rotate a body-frame vector into the world frame by the drone's yaw.

    The z component is unchanged; the norm is preserved.
    """
    rad = math.radians(yaw_deg)
    c = math.cos(rad)
    s = math.sin(rad)
    return (c * v[0] - s * v[1], s * v[0] + c * v[1], v[2])


def world_to_body(v: Vec3, yaw_deg: float) -> Vec3:
    """Inverse of :func:`body_to_world`."""
    return body_to_world(v, -yaw_deg)


def saturate(v: Vec3, vmax: float) -> Vec3:
    """Clamp a vector's magnitude to ``vmax``, preserving its direction."""
    n = norm(v)
    if n <= vmax:
        return v
    s = vmax / n
    return (v[0] * s, v[1] * s, v[2] * s)


def clamp(x: float, lo: float, hi: float) -> float:
    if x < lo:
        return lo
    if x > hi:
        return hi
    return x


def is_finite3(v) -> bool:
    return (
        len(v) == 3
        and math.isfinite(v[0])
        and math.isfinite(v[1])
        and math.isfinite(v[2])
    )
