"""Range-and-bearing broadcast medium.

A message sent at tick k is delivered at tick k+1 to every other drone
within the sender's configured range (0 = unlimited), measured at delivery
time. Each receiver learns the distance and the direction of the sender in
its own body frame: the horizontal bearing is positive to the receiver's
left, the vertical bearing is the elevation angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .geometry import Vec3


@dataclass(frozen=True)
class RabConfig:
    range_m: float = 0.0      # 0 means unlimited
    payload_max: int = 16

    def __post_init__(self):
        if self.range_m < 0.0:
            raise ValueError("range must be >= 0")
        if self.payload_max < 1:
            raise ValueError("payload_max must be >= 1")


class RabReading(NamedTuple):
    range_m: float
    horizontal_bearing_deg: float
    vertical_bearing_deg: float
    payload: bytes
    sender_id: str


class PayloadError(ValueError):
    """Message payload exceeds the configured maximum."""


def make_reading(
    receiver_position: Vec3,
    receiver_yaw_deg: float,
    sender_position: Vec3,
    payload: bytes,
    sender_id: str,
) -> RabReading:
    """Build the reading a receiver gets for a delivered message."""
    dx = sender_position[0] - receiver_position[0]
    dy = sender_position[1] - receiver_position[1]
    dz = sender_position[2] - receiver_position[2]
    horiz = math.hypot(dx, dy)
    rng = math.sqrt(dx * dx + dy * dy + dz * dz)
    bearing = math.degrees(math.atan2(dy, dx)) - receiver_yaw_deg
    # Wrap to (-180, 180].
    bearing = math.fmod(bearing + 180.0, 360.0)
    if bearing <= 0.0:
        bearing += 360.0
    bearing -= 180.0
    elevation = math.degrees(math.atan2(dz, horiz))
    return RabReading(rng, bearing, elevation, payload, sender_id)
