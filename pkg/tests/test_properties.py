"""Hypothesis property tests for the core invariants."""

import math

from hypothesis import given, settings
from hypothesis import strategies as st

from dronesim.battery import BatteryModel, battery_next_charge
from dronesim.control import (
    Command,
    ControllerLimits,
    ControllerMemory,
    DroneState,
    GainSet,
    velocity_control_step,
)
from dronesim.geometry import body_to_world, norm, saturate, wrap_deg
from dronesim.rab import make_reading
from dronesim.trajectory import mse

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)
small = st.floats(min_value=-50.0, max_value=50.0, allow_nan=False)
vec3 = st.tuples(small, small, small)
angle = st.floats(min_value=-720.0, max_value=720.0, allow_nan=False)


@given(vec3, st.floats(min_value=1e-3, max_value=100.0))
def test_saturate_direction_and_magnitude(v, vmax):
    clipped = saturate(v, vmax)
    n = norm(v)
    assert norm(clipped) <= vmax + 1e-12
    if n > vmax and n > 0.0:
        cos = sum(a * b for a, b in zip(v, clipped)) / (n * norm(clipped))
        assert abs(cos - 1.0) <= 1e-12
    elif n <= vmax:
        assert clipped == v


@given(angle)
def test_wrap_deg_in_half_open_range(a):
    w = wrap_deg(a)
    assert -180.0 < w <= 180.0


@given(vec3, angle)
def test_body_to_world_preserves_norm(v, yaw):
    rotated = body_to_world(v, yaw)
    assert abs(norm(rotated) - norm(v)) <= 1e-9 * max(1.0, norm(v))
    assert rotated[2] == v[2]


@given(vec3, angle)
def test_body_world_round_trip(v, yaw):
    from dronesim.geometry import world_to_body

    back = world_to_body(body_to_world(v, yaw), yaw)
    for a, b in zip(back, v):
        assert abs(a - b) <= 1e-9 * max(1.0, abs(b))


@given(
    st.lists(st.floats(min_value=-100, max_value=100, allow_nan=False),
             min_size=1, max_size=400),
    st.randoms(),
)
def test_mse_matches_naive_oracle(series, rnd):
    other = [x + rnd.uniform(-1, 1) for x in series]
    naive = sum((a - b) ** 2 for a, b in zip(series, other)) / len(series)
    got = mse(series, other)
    assert abs(got - naive) <= 1e-12 * max(1.0, abs(naive))


@given(
    st.integers(min_value=1, max_value=40),
    st.floats(min_value=0.01, max_value=2.0, allow_nan=False),
)
@settings(max_examples=200, deadline=None)
def test_battery_composition_matches_curve(k, dt):
    model = BatteryModel()
    charge = 1.0
    for _ in range(k):
        charge = battery_next_charge(model, charge, dt)
    assert abs(charge - model.charge_at(k * dt)) <= 1e-9


@given(vec3, vec3, angle, angle)
def test_rab_reading_matches_closed_form(rx, sx, yaw, phi):
    if math.dist(rx, sx) < 1e-9:
        return
    reading = make_reading(rx, yaw, sx, b"", "s")
    assert abs(reading.range_m - math.dist(rx, sx)) <= 1e-9
    rotated = make_reading(rx, yaw + phi, sx, b"", "s")
    diff = wrap_deg(rotated.horizontal_bearing_deg
                    - (reading.horizontal_bearing_deg - phi))
    assert abs(diff) <= 1e-6
    assert -90.0 <= reading.vertical_bearing_deg <= 90.0


@given(vec3, st.floats(min_value=-179.0, max_value=179.0), vec3)
@settings(max_examples=300, deadline=None)
def test_velocity_frame_equivalence(v_cmd, yaw, v0):
    """A body command at yaw theta behaves exactly like the equivalent
    world command, tick for tick."""
    state = DroneState((0.0, 0.0, 1.0), yaw, saturate(v0, 10.0), 0.0, 1.0)
    gains = GainSet()
    limits = ControllerLimits()
    body_cmd = Command.velocity(v_cmd, frame="body")
    world_cmd = Command.velocity(body_to_world(v_cmd, yaw), frame="world")
    sa, sb = state, state
    ma, mb = ControllerMemory(), ControllerMemory()
    for _ in range(10):
        va, ra, ma = velocity_control_step(sa, ma, body_cmd, gains, limits, 0.1)
        vb, rb, mb = velocity_control_step(sb, mb, world_cmd, gains, limits, 0.1)
        assert va == vb and ra == rb
        from dronesim.control import integrate

        sa = integrate(sa, va, ra, 0.1)
        sb = integrate(sb, vb, rb, 0.1)
        assert sa == sb


@given(st.data())
@settings(max_examples=100, deadline=None)
def test_scenario_round_trip_random(data):
    from dronesim.scenario import (
        DroneSpec, LightSpec, Scenario, WaypointPlan,
        load_scenario, render_scenario,
    )
    from dronesim.control import PDGains

    n_drones = data.draw(st.integers(min_value=1, max_value=3))
    coord = st.floats(min_value=-1.4, max_value=1.4, allow_nan=False)
    drones = []
    for i in range(n_drones):
        drones.append(
            DroneSpec(
                id=f"d{i}",
                position=(
                    data.draw(coord), data.draw(coord),
                    data.draw(st.floats(min_value=0.0, max_value=2.9)),
                ),
                yaw=data.draw(st.floats(min_value=-179.0, max_value=180.0)),
                charge=data.draw(st.floats(min_value=0.0, max_value=1.0)),
                gains=GainSet(
                    velocity=PDGains(
                        data.draw(st.floats(min_value=0.1, max_value=20.0)),
                        data.draw(st.floats(min_value=0.0, max_value=1.0)),
                    )
                ),
                led_on=data.draw(st.booleans()),
            )
        )
    scenario = Scenario(
        name="prop",
        dt=data.draw(st.sampled_from((0.05, 0.1, 0.2))),
        duration=data.draw(st.integers(min_value=0, max_value=500)),
        drones=tuple(drones),
    )
    assert load_scenario(render_scenario(scenario)) == scenario
