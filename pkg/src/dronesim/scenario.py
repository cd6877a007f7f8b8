"""Scenario documents: parsing, validation, and rendering.

A scenario is an INI-style plain-text document (see docs/scenario_format.md
for the full grammar) with a ``[scenario]`` section for world-level settings
and one section per drone, light, command script, or waypoint plan. All
settings have defaults matching the stock drone: dt 0.1 s, a 3x3x3 m arena,
10 m/s speed limit, 90 deg/s yaw rate limit, and the stock battery curve.

``load_scenario(render_scenario(s))`` reproduces ``s`` exactly (structural
equality), which the test suite checks over randomized scenarios.
"""

from __future__ import annotations

import configparser
import io
import math
import re
from dataclasses import dataclass, field
from typing import Optional

from .battery import BatteryModel, BatteryModelError
from .camera import CameraConfig
from .control import BODY, POSITION, VELOCITY, WORLD, Command, ControllerLimits, GainSet, PDGains
from .geometry import Vec3, is_finite3
from .rab import RabConfig

FORMAT_VERSION = 1

DEFAULT_DT = 0.1
DEFAULT_ARENA_MIN = (-1.5, -1.5, 0.0)
DEFAULT_ARENA_MAX = (1.5, 1.5, 3.0)


class ScenarioError(ValueError):
    """Malformed or invalid scenario document.

    ``location`` is a field path such as ``[drone cf1] charge`` or a line
    number for syntax errors.
    """

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


@dataclass(frozen=True)
class LightSpec:
    id: str
    position: Vec3
    color: tuple[int, int, int] = (255, 255, 255)


@dataclass(frozen=True)
class WaypointPlan:
    """Fly through ``points`` at constant ``speed``, advancing when within
    ``threshold`` metres; hold position at the final point."""

    speed: float
    points: tuple[Vec3, ...]
    threshold: float = 0.05


@dataclass(frozen=True)
class DroneSpec:
    id: str
    position: Vec3 = (0.0, 0.0, 0.0)
    yaw: float = 0.0
    charge: float = 1.0
    gains: GainSet = GainSet()
    limits: ControllerLimits = ControllerLimits()
    camera: Optional[CameraConfig] = None
    rab: RabConfig = RabConfig()
    rab_broadcast: Optional[bytes] = None
    led_color: tuple[int, int, int] = (255, 255, 255)
    led_on: bool = False
    battery: BatteryModel = BatteryModel()


@dataclass(frozen=True)
class Scenario:
    name: str = "scenario"
    dt: float = DEFAULT_DT
    duration: int = 0
    arena_min: Vec3 = DEFAULT_ARENA_MIN
    arena_max: Vec3 = DEFAULT_ARENA_MAX
    drones: tuple[DroneSpec, ...] = ()
    lights: tuple[LightSpec, ...] = ()
    scripts: dict[str, tuple[tuple[int, Command], ...]] = field(default_factory=dict)
    waypoints: dict[str, WaypointPlan] = field(default_factory=dict)
    noise_seed: int = 0
    noise_position_std: float = 0.0

    def __post_init__(self):
        validate_scenario(self)


_NAME_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")


def validate_scenario(s: Scenario) -> None:
    if not _NAME_RE.match(s.name):
        raise ScenarioError(
            "name must be alphanumeric with . _ - only", "[scenario] name"
        )
    if s.dt <= 0.0 or not math.isfinite(s.dt):
        raise ScenarioError("dt must be > 0", "[scenario] dt")
    if s.duration < 0:
        raise ScenarioError("duration must be >= 0", "[scenario] duration")
    if not (is_finite3(s.arena_min) and is_finite3(s.arena_max)):
        raise ScenarioError("arena bounds must be finite", "[scenario] arena")
    for axis in range(3):
        if s.arena_min[axis] >= s.arena_max[axis]:
            raise ScenarioError(
                "arena_min must be strictly below arena_max on every axis",
                "[scenario] arena",
            )
    if s.noise_position_std < 0.0:
        raise ScenarioError("noise std must be >= 0", "[scenario] noise_position_std")
    ids = [d.id for d in s.drones]
    if len(set(ids)) != len(ids):
        raise ScenarioError("duplicate drone id", "[scenario] drones")
    known = set(ids)
    for d in s.drones:
        loc = f"[drone {d.id}]"
        if not _NAME_RE.match(d.id):
            raise ScenarioError("bad drone id", f"{loc} id")
        if not is_finite3(d.position):
            raise ScenarioError("position must be finite", f"{loc} position")
        if not math.isfinite(d.yaw):
            raise ScenarioError("yaw must be finite", f"{loc} yaw")
        if not 0.0 <= d.charge <= 1.0:
            raise ScenarioError("charge must be in [0, 1]", f"{loc} charge")
        if d.rab_broadcast is not None and len(d.rab_broadcast) > d.rab.payload_max:
            raise ScenarioError(
                f"broadcast payload exceeds payload_max {d.rab.payload_max}",
                f"{loc} rab_broadcast",
            )
        _check_color(d.led_color, f"{loc} led_color")
    for light in s.lights:
        loc = f"[light {light.id}]"
        if not _NAME_RE.match(light.id):
            raise ScenarioError("bad light id", f"{loc} id")
        if not is_finite3(light.position):
            raise ScenarioError("position must be finite", f"{loc} position")
        _check_color(light.color, f"{loc} color")
    light_ids = [l.id for l in s.lights]
    if len(set(light_ids)) != len(light_ids):
        raise ScenarioError("duplicate light id", "[scenario] lights")
    for drone_id, entries in s.scripts.items():
        loc = f"[script {drone_id}]"
        if drone_id not in known:
            raise ScenarioError(f"unknown drone {drone_id!r}", loc)
        prev = -1
        for tick, cmd in entries:
            if tick < 0:
                raise ScenarioError("script ticks must be >= 0", loc)
            if tick < prev:
                raise ScenarioError("script ticks must be non-decreasing", loc)
            prev = tick
            if not isinstance(cmd, Command):
                raise ScenarioError("script entries must hold commands", loc)
    for drone_id, plan in s.waypoints.items():
        loc = f"[waypoints {drone_id}]"
        if drone_id not in known:
            raise ScenarioError(f"unknown drone {drone_id!r}", loc)
        if drone_id in s.scripts:
            raise ScenarioError(
                "a drone cannot have both a script and a waypoint plan", loc
            )
        if not plan.speed > 0.0:
            raise ScenarioError("speed must be > 0", f"{loc} speed")
        if not plan.threshold > 0.0:
            raise ScenarioError("threshold must be > 0", f"{loc} threshold")
        if not plan.points:
            raise ScenarioError("at least one waypoint required", f"{loc} points")
        for p in plan.points:
            if not is_finite3(p):
                raise ScenarioError("waypoints must be finite", f"{loc} points")


def _check_color(color, location):
    if len(color) != 3 or not all(
        isinstance(ch, int) and 0 <= ch <= 255 for ch in color
    ):
        raise ScenarioError("color must be three integers in [0, 255]", location)


# --------------------------------------------------------------------------
# Parsing

_SCENARIO_KEYS = {
    "format_version", "name", "dt", "duration", "arena_min", "arena_max",
    "noise_seed", "noise_position_std",
}
_DRONE_KEYS = {
    "position", "yaw", "charge",
    "kp_vel", "kd_vel", "kp_vel_yaw", "kd_vel_yaw",
    "kp_pos", "kd_pos", "kp_pos_yaw", "kd_pos_yaw",
    "max_speed", "max_yaw_rate", "max_accel", "max_yaw_accel",
    "camera", "camera_aperture", "camera_yaw_offset",
    "rab_range", "rab_payload_max", "rab_broadcast",
    "led_color", "led_on",
    "battery_coeffs", "battery_tmax", "battery_cutoff", "battery_load_factor",
}
_LIGHT_KEYS = {"position", "color"}
_SCRIPT_KEYS = {"commands"}
_WAYPOINT_KEYS = {"speed", "threshold", "points"}


def load_scenario(text: str) -> Scenario:
    """Parse and validate a scenario document."""
    parser = configparser.ConfigParser(
        interpolation=None, strict=True, delimiters=("=",)
    )
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ScenarioError(f"syntax error: {exc.message.splitlines()[0]}",
                            f"line {exc.lineno}") from exc
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if getattr(exc, "errors", None) else "?"
        raise ScenarioError("syntax error", f"line {lineno}") from exc
    except configparser.DuplicateSectionError as exc:
        raise ScenarioError(f"duplicate section [{exc.section}]",
                            f"line {exc.lineno}") from exc
    except configparser.DuplicateOptionError as exc:
        raise ScenarioError(f"duplicate key {exc.option!r}",
                            f"line {exc.lineno}") from exc
    except configparser.Error as exc:
        raise ScenarioError(f"syntax error: {exc}") from exc

    if not parser.has_section("scenario"):
        raise ScenarioError("missing [scenario] section", "[scenario]")
    world = _Section("[scenario]", dict(parser.items("scenario")), _SCENARIO_KEYS)
    version = world.get_int("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise ScenarioError(
            f"unsupported format_version {version}", "[scenario] format_version"
        )

    drones: list[DroneSpec] = []
    lights: list[LightSpec] = []
    scripts: dict[str, tuple] = {}
    waypoints: dict[str, WaypointPlan] = {}
    for section in parser.sections():
        if section == "scenario":
            continue
        kind, _, ident = section.partition(" ")
        ident = ident.strip()
        if not ident:
            raise ScenarioError(f"section [{section}] needs a name", f"[{section}]")
        items = _Section(f"[{section}]", dict(parser.items(section)), None)
        if kind == "drone":
            items.allowed = _DRONE_KEYS
            drones.append(_parse_drone(ident, items))
        elif kind == "light":
            items.allowed = _LIGHT_KEYS
            lights.append(
                LightSpec(
                    id=ident,
                    position=items.get_vec3("position", required=True),
                    color=items.get_color("color", (255, 255, 255)),
                )
            )
        elif kind == "script":
            items.allowed = _SCRIPT_KEYS
            scripts[ident] = _parse_script(items)
        elif kind == "waypoints":
            items.allowed = _WAYPOINT_KEYS
            waypoints[ident] = WaypointPlan(
                speed=items.get_float("speed", required=True),
                threshold=items.get_float("threshold", 0.05),
                points=items.get_points("points"),
            )
        else:
            raise ScenarioError(f"unknown section kind {kind!r}", f"[{section}]")
        items.reject_unknown()
    world.reject_unknown()

    return Scenario(
        name=world.get_str("name", "scenario"),
        dt=world.get_float("dt", DEFAULT_DT),
        duration=world.get_int("duration", 0),
        arena_min=world.get_vec3("arena_min", DEFAULT_ARENA_MIN),
        arena_max=world.get_vec3("arena_max", DEFAULT_ARENA_MAX),
        drones=tuple(drones),
        lights=tuple(lights),
        scripts=scripts,
        waypoints=waypoints,
        noise_seed=world.get_int("noise_seed", 0),
        noise_position_std=world.get_float("noise_position_std", 0.0),
    )


def load_scenario_file(path) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return load_scenario(fh.read())


class _Section:
    """One parsed section with typed accessors and unknown-key rejection."""

    def __init__(self, location, raw, allowed):
        self.location = location
        self.raw = raw
        self.allowed = allowed
        self.seen = set()

    def _fetch(self, key, required):
        self.seen.add(key)
        if key not in self.raw:
            if required:
                raise ScenarioError("missing required key", f"{self.location} {key}")
            return None
        return self.raw[key]

    def get_str(self, key, default=None, required=False):
        value = self._fetch(key, required)
        return default if value is None else value.strip()

    def get_float(self, key, default=None, required=False):
        value = self._fetch(key, required)
        if value is None:
            return default
        try:
            return float(value)
        except ValueError as exc:
            raise ScenarioError(f"not a number: {value!r}",
                                f"{self.location} {key}") from exc

    def get_int(self, key, default=None, required=False):
        value = self._fetch(key, required)
        if value is None:
            return default
        try:
            return int(value)
        except ValueError as exc:
            raise ScenarioError(f"not an integer: {value!r}",
                                f"{self.location} {key}") from exc

    def get_bool(self, key, default=False):
        value = self._fetch(key, False)
        if value is None:
            return default
        lowered = value.strip().lower()
        if lowered in ("true", "on", "yes", "1"):
            return True
        if lowered in ("false", "off", "no", "0"):
            return False
        raise ScenarioError(f"not a boolean: {value!r}", f"{self.location} {key}")

    def get_vec3(self, key, default=None, required=False):
        value = self._fetch(key, required)
        if value is None:
            return default
        parts = value.split()
        if len(parts) != 3:
            raise ScenarioError("expected three numbers", f"{self.location} {key}")
        try:
            return tuple(float(p) for p in parts)
        except ValueError as exc:
            raise ScenarioError(f"not a number in {value!r}",
                                f"{self.location} {key}") from exc

    def get_color(self, key, default=None, required=False):
        value = self._fetch(key, required)
        if value is None:
            return default
        parts = value.split()
        if len(parts) != 3:
            raise ScenarioError("expected three integers", f"{self.location} {key}")
        try:
            color = tuple(int(p) for p in parts)
        except ValueError as exc:
            raise ScenarioError(f"not an integer in {value!r}",
                                f"{self.location} {key}") from exc
        _check_color(color, f"{self.location} {key}")
        return color

    def get_bytes(self, key):
        value = self._fetch(key, False)
        if value is None:
            return None
        try:
            return bytes.fromhex(value.replace(" ", ""))
        except ValueError as exc:
            raise ScenarioError(f"not hex bytes: {value!r}",
                                f"{self.location} {key}") from exc

    def get_floats(self, key, count, default=None):
        value = self._fetch(key, False)
        if value is None:
            return default
        parts = value.split()
        if len(parts) != count:
            raise ScenarioError(f"expected {count} numbers", f"{self.location} {key}")
        try:
            return tuple(float(p) for p in parts)
        except ValueError as exc:
            raise ScenarioError(f"not a number in {value!r}",
                                f"{self.location} {key}") from exc

    def get_points(self, key):
        value = self._fetch(key, True)
        points = []
        for line in value.splitlines():
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ScenarioError(f"expected three numbers per point, got {line!r}",
                                    f"{self.location} {key}")
            try:
                points.append(tuple(float(p) for p in parts))
            except ValueError as exc:
                raise ScenarioError(f"not a number in {line!r}",
                                    f"{self.location} {key}") from exc
        return tuple(points)

    def reject_unknown(self):
        unknown = set(self.raw) - (self.allowed or set())
        if unknown:
            key = sorted(unknown)[0]
            raise ScenarioError("unknown key", f"{self.location} {key}")


def _parse_drone(ident: str, items: _Section) -> DroneSpec:
    loc = items.location
    gains = GainSet(
        velocity=_pd(items, "kp_vel", "kd_vel", GainSet().velocity),
        velocity_yaw=_pd(items, "kp_vel_yaw", "kd_vel_yaw", GainSet().velocity_yaw),
        position=_pd(items, "kp_pos", "kd_pos", GainSet().position),
        position_yaw=_pd(items, "kp_pos_yaw", "kd_pos_yaw", GainSet().position_yaw),
    )
    defaults = ControllerLimits()
    try:
        limits = ControllerLimits(
            max_linear_speed=items.get_float("max_speed", defaults.max_linear_speed),
            max_yaw_rate=items.get_float("max_yaw_rate", defaults.max_yaw_rate),
            max_linear_accel=items.get_float("max_accel", defaults.max_linear_accel),
            max_yaw_accel=items.get_float("max_yaw_accel", defaults.max_yaw_accel),
        )
    except ValueError as exc:
        raise ScenarioError(str(exc), f"{loc} limits") from exc
    camera = None
    if items.get_bool("camera", False):
        try:
            camera = CameraConfig(
                aperture_deg=items.get_float("camera_aperture", 50.0),
                mount_yaw_offset_deg=items.get_float("camera_yaw_offset", 0.0),
            )
        except ValueError as exc:
            raise ScenarioError(str(exc), f"{loc} camera_aperture") from exc
    else:
        items.seen.update(("camera_aperture", "camera_yaw_offset"))
        if "camera_aperture" in items.raw or "camera_yaw_offset" in items.raw:
            raise ScenarioError("camera keys set but camera is off", f"{loc} camera")
    try:
        rab = RabConfig(
            range_m=items.get_float("rab_range", 0.0),
            payload_max=items.get_int("rab_payload_max", 16),
        )
    except ValueError as exc:
        raise ScenarioError(str(exc), f"{loc} rab") from exc
    coeffs = items.get_floats("battery_coeffs", 4, None)
    t_max = items.get_float("battery_tmax", None)
    cutoff = items.get_float("battery_cutoff", None)
    load = items.get_float("battery_load_factor", None)
    try:
        if coeffs is None and t_max is None and cutoff is None and load is None:
            model = BatteryModel()
        else:
            model = BatteryModel(
                coeffs=coeffs if coeffs is not None else BatteryModel().coeffs,
                t_max=t_max if t_max is not None else BatteryModel().t_max,
                cutoff_charge=cutoff,
                load_factor=load if load is not None else 1.0,
            )
    except BatteryModelError as exc:
        raise ScenarioError(str(exc), f"{loc} battery") from exc
    return DroneSpec(
        id=ident,
        position=items.get_vec3("position", (0.0, 0.0, 0.0)),
        yaw=items.get_float("yaw", 0.0),
        charge=items.get_float("charge", 1.0),
        gains=gains,
        limits=limits,
        camera=camera,
        rab=rab,
        rab_broadcast=items.get_bytes("rab_broadcast"),
        led_color=items.get_color("led_color", (255, 255, 255)),
        led_on=items.get_bool("led_on", False),
        battery=model,
    )


def _pd(items: _Section, kp_key: str, kd_key: str, default: PDGains) -> PDGains:
    kp = items.get_float(kp_key, default.kp)
    kd = items.get_float(kd_key, default.kd)
    try:
        return PDGains(kp, kd)
    except ValueError as exc:
        raise ScenarioError(str(exc), f"{items.location} {kp_key}") from exc


def _parse_script(items: _Section) -> tuple[tuple[int, Command], ...]:
    value = items._fetch("commands", True)
    entries = []
    for line in value.splitlines():
        line = line.strip()
        if not line:
            continue
        entries.append(_parse_command_line(line, items.location))
    return tuple(entries)


def _parse_command_line(line: str, location: str) -> tuple[int, Command]:
    parts = line.split()
    if len(parts) != 7:
        raise ScenarioError(
            f"expected 'tick kind frame x y z angular', got {line!r}",
            f"{location} commands",
        )
    try:
        tick = int(parts[0])
        linear = (float(parts[3]), float(parts[4]), float(parts[5]))
        angular = float(parts[6])
    except ValueError as exc:
        raise ScenarioError(f"bad number in {line!r}",
                            f"{location} commands") from exc
    kind, frame = parts[1], parts[2]
    if kind not in (VELOCITY, POSITION):
        raise ScenarioError(f"unknown command kind {kind!r}", f"{location} commands")
    if frame not in (BODY, WORLD):
        raise ScenarioError(f"unknown frame {frame!r}", f"{location} commands")
    try:
        return tick, Command(kind, frame, linear, angular)
    except ValueError as exc:
        raise ScenarioError(str(exc), f"{location} commands") from exc


# --------------------------------------------------------------------------
# Rendering

def render_scenario(s: Scenario) -> str:
    """Serialize a scenario so that load_scenario reproduces it exactly."""
    out = io.StringIO()
    w = out.write
    w("[scenario]\n")
    w(f"format_version = {FORMAT_VERSION}\n")
    w(f"name = {s.name}\n")
    w(f"dt = {s.dt!r}\n")
    w(f"duration = {s.duration}\n")
    w(f"arena_min = {_vec(s.arena_min)}\n")
    w(f"arena_max = {_vec(s.arena_max)}\n")
    if s.noise_seed:
        w(f"noise_seed = {s.noise_seed}\n")
    if s.noise_position_std:
        w(f"noise_position_std = {s.noise_position_std!r}\n")
    for d in s.drones:
        w(f"\n[drone {d.id}]\n")
        w(f"position = {_vec(d.position)}\n")
        w(f"yaw = {d.yaw!r}\n")
        w(f"charge = {d.charge!r}\n")
        defaults = GainSet()
        _write_pd(w, d.gains.velocity, defaults.velocity, "kp_vel", "kd_vel")
        _write_pd(w, d.gains.velocity_yaw, defaults.velocity_yaw, "kp_vel_yaw", "kd_vel_yaw")
        _write_pd(w, d.gains.position, defaults.position, "kp_pos", "kd_pos")
        _write_pd(w, d.gains.position_yaw, defaults.position_yaw, "kp_pos_yaw", "kd_pos_yaw")
        lim_defaults = ControllerLimits()
        if d.limits.max_linear_speed != lim_defaults.max_linear_speed:
            w(f"max_speed = {d.limits.max_linear_speed!r}\n")
        if d.limits.max_yaw_rate != lim_defaults.max_yaw_rate:
            w(f"max_yaw_rate = {d.limits.max_yaw_rate!r}\n")
        if d.limits.max_linear_accel != lim_defaults.max_linear_accel:
            w(f"max_accel = {d.limits.max_linear_accel!r}\n")
        if d.limits.max_yaw_accel != lim_defaults.max_yaw_accel:
            w(f"max_yaw_accel = {d.limits.max_yaw_accel!r}\n")
        if d.camera is not None:
            w("camera = on\n")
            if d.camera.aperture_deg != 50.0:
                w(f"camera_aperture = {d.camera.aperture_deg!r}\n")
            if d.camera.mount_yaw_offset_deg != 0.0:
                w(f"camera_yaw_offset = {d.camera.mount_yaw_offset_deg!r}\n")
        rab_defaults = RabConfig()
        if d.rab.range_m != rab_defaults.range_m:
            w(f"rab_range = {d.rab.range_m!r}\n")
        if d.rab.payload_max != rab_defaults.payload_max:
            w(f"rab_payload_max = {d.rab.payload_max}\n")
        if d.rab_broadcast is not None:
            w(f"rab_broadcast = {d.rab_broadcast.hex()}\n")
        if d.led_color != (255, 255, 255):
            w(f"led_color = {d.led_color[0]} {d.led_color[1]} {d.led_color[2]}\n")
        if d.led_on:
            w("led_on = true\n")
        stock = BatteryModel()
        if d.battery.coeffs != stock.coeffs:
            w(f"battery_coeffs = {' '.join(repr(c) for c in d.battery.coeffs)}\n")
        if d.battery.t_max != stock.t_max:
            w(f"battery_tmax = {d.battery.t_max!r}\n")
        if d.battery.cutoff_charge != d.battery.poly(d.battery.t_max):
            w(f"battery_cutoff = {d.battery.cutoff_charge!r}\n")
        if d.battery.load_factor != stock.load_factor:
            w(f"battery_load_factor = {d.battery.load_factor!r}\n")
    for light in s.lights:
        w(f"\n[light {light.id}]\n")
        w(f"position = {_vec(light.position)}\n")
        w(f"color = {light.color[0]} {light.color[1]} {light.color[2]}\n")
    for drone_id, entries in s.scripts.items():
        w(f"\n[script {drone_id}]\n")
        w("commands =\n")
        for tick, cmd in entries:
            w(
                f"    {tick} {cmd.kind} {cmd.frame} "
                f"{cmd.linear[0]!r} {cmd.linear[1]!r} {cmd.linear[2]!r} "
                f"{cmd.angular!r}\n"
            )
    for drone_id, plan in s.waypoints.items():
        w(f"\n[waypoints {drone_id}]\n")
        w(f"speed = {plan.speed!r}\n")
        w(f"threshold = {plan.threshold!r}\n")
        w("points =\n")
        for p in plan.points:
            w(f"    {_vec(p)}\n")
    return out.getvalue()


def _vec(v: Vec3) -> str:
    return f"{v[0]!r} {v[1]!r} {v[2]!r}"


def _write_pd(w, pd: PDGains, default: PDGains, kp_key: str, kd_key: str) -> None:
    if pd.kp != default.kp:
        w(f"{kp_key} = {pd.kp!r}\n")
    if pd.kd != default.kd:
        w(f"{kd_key} = {pd.kd!r}\n")
