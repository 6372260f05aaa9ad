import math

import numpy as np
import pytest

from kiloswarm.core.constants import ControllerKind, Mode, Turn
from kiloswarm.core.exceptions import ConfigError
from kiloswarm.core.types import STOP, MotorCommand, Pose
from kiloswarm.sim.controllers import (
    ControllerSpec,
    ControllerState,
    PhototaxisController,
    PhototaxisParams,
    RandomWalkController,
    RandomWalkParams,
    RandomWalkState,
    StraightController,
    build_controller,
    phototaxis_step,
    random_walk_step,
    straight_step,
    turn_command,
)
from kiloswarm.sim.environment import LightField
from kiloswarm.sim.kinematics import RobotParams, simulate_trajectory, step
from kiloswarm.utils.rng import DecisionStream, MotorNoise, streams_from_seed

LIGHT = LightField()


def decisions(seed=0):
    return DecisionStream(np.random.default_rng(seed))


class CountingStream(DecisionStream):
    def __init__(self, seed=0):
        super().__init__(np.random.default_rng(seed))
        self.draws = 0

    def uniform(self):
        self.draws += 1
        return super().uniform()


class ScriptedStream:
    """Fixed answers for the random-walk draws."""

    def __init__(self, angle, run):
        self.angle = angle
        self.run = run

    def symmetric(self, half_width):
        return self.angle

    def exponential(self, mean):
        return self.run


class RecordingStream(DecisionStream):
    def __init__(self, seed=0):
        super().__init__(np.random.default_rng(seed))
        self.runs = []

    def exponential(self, mean):
        value = super().exponential(mean)
        self.runs.append(value)
        return value


def test_improvement_keeps_going_forward():
    state = ControllerState(Mode.FORWARD, 0.0, previous_error=5.0)
    cmd, state = phototaxis_step(state, PhototaxisParams(), 1020.0, decisions(), 0.1)
    assert cmd == MotorCommand(0.5, 0.5)
    assert state.mode == Mode.FORWARD
    assert state.previous_error == 3.0


def test_no_improvement_with_certain_right_turn():
    state = ControllerState(Mode.FORWARD, 0.0, previous_error=3.0)
    cmd, state = phototaxis_step(state, PhototaxisParams(p_right=1.0), 1018.0, decisions(), 0.1)
    assert state.mode == Mode.TURNING
    assert state.turn_direction == Turn.RIGHT
    assert cmd == MotorCommand(0.0, 0.5)


def test_ties_count_as_no_improvement():
    state = ControllerState(Mode.FORWARD, 0.0, previous_error=5.0)
    _, state = phototaxis_step(state, PhototaxisParams(p_right=0.0), 1018.0, decisions(), 0.1)
    assert state.mode == Mode.TURNING
    assert state.turn_direction == Turn.LEFT


def test_stop_is_absorbing():
    params = PhototaxisParams()
    cmd, state = phototaxis_step(ControllerState(), params, 1023.0, decisions(), 0.1)
    assert cmd == STOP
    assert state.mode == Mode.STOPPED
    for reading in (0.0, 500.0, 1023.0):
        cmd, state = phototaxis_step(state, params, reading, decisions(), 0.1)
        assert cmd == STOP
        assert state.mode == Mode.STOPPED


def test_one_direction_draw_per_turning_bout():
    stream = CountingStream()
    state = ControllerState(Mode.FORWARD, 0.0, previous_error=3.0)
    params = PhototaxisParams(turn_duration=0.5)
    # error stays at 5: every sample instant is a non-improvement
    for _ in range(5):
        _, state = phototaxis_step(state, params, 1018.0, stream, 0.1)
    assert stream.draws == 1
    for _ in range(5):
        _, state = phototaxis_step(state, params, 1018.0, stream, 0.1)
    assert stream.draws == 2


def test_forward_mode_samples_every_period():
    stream = CountingStream()
    params = PhototaxisParams(forward_duration=1.0, sample_period=0.5)
    state = ControllerState()
    readings = [100.0 + 10.0 * k for k in range(12)]
    modes = []
    for reading in readings:
        _, state = phototaxis_step(state, params, reading, stream, 0.1)
        modes.append(state.mode)
    assert modes == [Mode.FORWARD] * 12
    assert stream.draws == 0


def test_certain_right_turner_never_turns_left():
    controller = PhototaxisController(LIGHT, PhototaxisParams(p_right=1.0), decisions(3))
    simulate_trajectory(Pose(0.6, 0.2, 1.0), controller, RobotParams(delta=0.01),
                        200.0, 0.1, MotorNoise(np.random.default_rng(3)))
    assert controller.left_turns == 0
    assert controller.right_turns > 0


def test_stopped_robot_keeps_its_distance():
    params = PhototaxisParams(stop_threshold=1023.0 * 0.2)
    controller = PhototaxisController(LIGHT, params, decisions())
    trajectory = simulate_trajectory(Pose(0.25, 0.0, 0.0), controller,
                                     RobotParams(sigma_motor=0.0), 20.0, 0.1,
                                     MotorNoise(np.random.default_rng(0)))
    assert controller.halted
    distances = np.hypot(trajectory.x, trajectory.y)
    assert np.all(distances == distances[0])


def test_phototaxis_gets_closer_to_the_light():
    controller = PhototaxisController(LIGHT, PhototaxisParams(), decisions(4))
    trajectory = simulate_trajectory(Pose(0.7, -0.4, 2.0), controller, RobotParams(),
                                     200.0, 0.1, MotorNoise(np.random.default_rng(4)))
    start = math.hypot(0.7, -0.4)
    assert math.hypot(trajectory.x[-1], trajectory.y[-1]) < start


def test_turn_command_is_a_single_wheel_pivot():
    assert turn_command(Turn.RIGHT, 0.5) == MotorCommand(0.0, 0.5)
    assert turn_command(Turn.LEFT, 0.5) == MotorCommand(0.5, 0.0)


def test_invalid_phototaxis_params():
    with pytest.raises(ConfigError):
        PhototaxisParams(p_right=1.5)
    with pytest.raises(ConfigError):
        PhototaxisParams(turn_duration=0.0)
    with pytest.raises(ConfigError):
        PhototaxisParams(stop_threshold=-1.0)


def test_mirrored_spec_exchanges_turn_probabilities():
    spec = ControllerSpec(ControllerKind.PHOTOTAXIS, phototaxis=PhototaxisParams(p_right=0.25))
    assert spec.mirrored().phototaxis.p_right == pytest.approx(0.75)
    assert spec.mirrored().kind == ControllerKind.PHOTOTAXIS


def test_random_walk_turn_then_run():
    params = RandomWalkParams(turn_rate=0.5)
    stream = ScriptedStream(angle=0.25, run=1.0)
    state = RandomWalkState(Mode.FORWARD, 0.0)
    commands = []
    for _ in range(6):
        cmd, state = random_walk_step(state, params, stream, 0.1)
        commands.append(cmd)
    assert commands[:5] == [MotorCommand(0.5, 0.0)] * 5
    assert commands[5] == MotorCommand(0.5, 0.5)
    assert state.bout_duration == 1.0


def test_negative_angle_turns_right():
    _, state = random_walk_step(RandomWalkState(Mode.FORWARD, 0.0), RandomWalkParams(),
                                ScriptedStream(angle=-0.5, run=1.0), 0.1)
    assert state.mode == Mode.TURNING
    assert state.turn_direction == Turn.RIGHT


def test_vanishing_turn_range_gives_straight_motion():
    controller = RandomWalkController(RandomWalkParams(turn_angle_range=1e-9,
                                                       mean_run_duration=2.0), decisions(1))
    commands = {controller.command(Pose(0.0, 0.0, 0.0), 0.1) for _ in range(2000)}
    assert commands == {MotorCommand(0.5, 0.5)}


def test_random_walk_is_deterministic():
    sequences = []
    for _ in range(2):
        controller = RandomWalkController(RandomWalkParams(mean_run_duration=1.0), decisions(9))
        sequences.append([controller.command(Pose(0.0, 0.0, 0.0), 0.1) for _ in range(500)])
    assert sequences[0] == sequences[1]


def test_mean_run_duration_over_many_bouts():
    stream = RecordingStream(5)
    params = RandomWalkParams(mean_run_duration=1.0, turn_angle_range=1e-9)
    state = RandomWalkState()
    while len(stream.runs) < 10_000:
        _, state = random_walk_step(state, params, stream, 0.1)
    assert np.mean(stream.runs[:10_000]) == pytest.approx(1.0, rel=0.03)


def test_invalid_random_walk_params():
    with pytest.raises(ConfigError):
        RandomWalkParams(mean_run_duration=0.0)
    with pytest.raises(ConfigError):
        RandomWalkParams(turn_angle_range=4.0)
    with pytest.raises(ConfigError):
        RandomWalkParams(turn_rate=1.5)
    with pytest.raises(ConfigError):
        RandomWalkParams(nominal_rate=0.0)
    assert RandomWalkParams(turn_rate=1.5, c_omega=2.0).pivot_rate == pytest.approx(0.75)


def test_turns_execute_at_the_configured_turn_rate():
    params = RandomWalkParams(turn_rate=0.25, c_omega=2.0)
    robot = RobotParams(c_omega=2.0, sigma_motor=0.0)
    state = RandomWalkState(Mode.FORWARD, 0.0)
    stream = ScriptedStream(angle=0.5, run=1.0)
    noise = MotorNoise(np.random.default_rng(0))
    pose = Pose(0.0, 0.0, 0.0)
    commands = []
    for _ in range(20):
        cmd, state = random_walk_step(state, params, stream, 0.1)
        commands.append(cmd)
        pose = step(pose, cmd, robot, 0.1, noise)
    assert commands == [MotorCommand(0.125, 0.0)] * 20
    assert pose.theta == pytest.approx(0.5)
    cmd, _ = random_walk_step(state, params, stream, 0.1)
    assert cmd == MotorCommand(0.5, 0.5)


def test_straight_step_and_factory():
    assert straight_step() == MotorCommand(0.5, 0.5)
    streams = streams_from_seed(1)
    assert isinstance(build_controller(ControllerSpec(), LIGHT, streams.decisions),
                      StraightController)
    assert isinstance(build_controller(ControllerSpec(ControllerKind.PHOTOTAXIS), LIGHT,
                                       streams.decisions), PhototaxisController)
    assert isinstance(build_controller(ControllerSpec(ControllerKind.RANDOM_WALK), LIGHT,
                                       streams.decisions), RandomWalkController)
    with pytest.raises(ConfigError):
        ControllerSpec("swim")
