"""
Robot behaviors: greedy stochastic phototaxis, run-and-tumble random walk and
straight-line motion.

The step functions are pure transitions (state in, state out); the controller
classes wrap them for closed-loop simulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

from ..core.constants import (
    DEFAULT_C_OMEGA,
    DEFAULT_FORWARD_DURATION,
    DEFAULT_MAX_RATE,
    DEFAULT_MEAN_RUN_DURATION,
    DEFAULT_NOMINAL_RATE,
    DEFAULT_P_RIGHT,
    DEFAULT_PEAK_INTENSITY,
    DEFAULT_SAMPLE_PERIOD,
    DEFAULT_STOP_THRESHOLD,
    DEFAULT_TURN_ANGLE_RANGE,
    DEFAULT_TURN_DURATION,
    DEFAULT_TURN_RATE,
    ControllerKind,
    Mode,
    Turn,
)
from ..core.exceptions import ConfigError
from ..core.types import STOP, MotorCommand, Pose
from ..utils.rng import DecisionStream
from .environment import LightField, sample_intensity

# Timer comparisons tolerate accumulated float error from repeated dt subtraction.
_EPS = 1e-9


def _check_rate(name: str, rate: float) -> None:
    if not 0.0 < rate <= DEFAULT_MAX_RATE:
        raise ConfigError(f"{name} must lie in (0, {DEFAULT_MAX_RATE}], got {rate}")


@dataclass(frozen=True)
class PhototaxisParams:
    p_right: float = DEFAULT_P_RIGHT
    forward_duration: float = DEFAULT_FORWARD_DURATION
    turn_duration: float = DEFAULT_TURN_DURATION
    objective_intensity: float = DEFAULT_PEAK_INTENSITY
    stop_threshold: float = DEFAULT_STOP_THRESHOLD
    sample_period: float = DEFAULT_SAMPLE_PERIOD
    nominal_rate: float = DEFAULT_NOMINAL_RATE

    def __post_init__(self):
        if not 0.0 <= self.p_right <= 1.0:
            raise ConfigError(f"p_right must lie in [0, 1], got {self.p_right}")
        if min(self.forward_duration, self.turn_duration, self.sample_period) <= 0:
            raise ConfigError("phototaxis durations and sample_period must be positive")
        if self.stop_threshold < 0:
            raise ConfigError(f"stop_threshold must be >= 0, got {self.stop_threshold}")
        _check_rate("nominal_rate", self.nominal_rate)

    def mirrored(self) -> "PhototaxisParams":
        return replace(self, p_right=1.0 - self.p_right)


@dataclass(frozen=True)
class ControllerState:
    """
    Phototaxis state. ``mode_timer`` is the time left in the current bout,
    ``sample_timer`` the time left until the next light sample while going
    forward.
    """

    mode: str = Mode.FORWARD
    mode_timer: float = 0.0
    previous_error: float = math.inf
    turn_direction: str = Turn.RIGHT
    sample_timer: float = 0.0


def turn_command(direction: str, nominal: float) -> MotorCommand:
    """Single-wheel pivot: a right turn drives only the left motor."""
    if direction == Turn.RIGHT:
        return MotorCommand(0.0, nominal)
    return MotorCommand(nominal, 0.0)


def _phototaxis_sample(state: ControllerState, params: PhototaxisParams, error: float,
                       rng: DecisionStream) -> ControllerState:
    if error < state.previous_error:
        return ControllerState(Mode.FORWARD, params.forward_duration, error,
                               state.turn_direction, params.sample_period)
    direction = Turn.RIGHT if rng.bernoulli(params.p_right) else Turn.LEFT
    return ControllerState(Mode.TURNING, params.turn_duration, error, direction, 0.0)


def phototaxis_step(
    state: ControllerState,
    params: PhototaxisParams,
    reading: float,
    rng: DecisionStream,
    dt: float,
) -> Tuple[MotorCommand, ControllerState]:
    """
    One control step of greedy phototaxis.

    A sample instant occurs every ``sample_period`` while going forward, when a
    forward bout runs out, and at the end of every turning bout. Improvement
    (strict decrease of |reading - objective|) starts or extends a forward
    bout; anything else starts a turning bout whose direction is drawn once.
    """
    if state.mode == Mode.STOPPED:
        return STOP, state
    error = abs(reading - params.objective_intensity)
    if error < params.stop_threshold:
        return STOP, ControllerState(Mode.STOPPED, 0.0, error, state.turn_direction, 0.0)

    if state.mode == Mode.TURNING:
        due = state.mode_timer <= _EPS
    else:
        due = state.sample_timer <= _EPS or state.mode_timer <= _EPS
    if due:
        state = _phototaxis_sample(state, params, error, rng)

    if state.mode == Mode.FORWARD:
        cmd = MotorCommand(params.nominal_rate, params.nominal_rate)
    else:
        cmd = turn_command(state.turn_direction, params.nominal_rate)
    state = replace(
        state,
        mode_timer=max(0.0, state.mode_timer - dt),
        sample_timer=max(0.0, state.sample_timer - dt),
    )
    return cmd, state


@dataclass(frozen=True)
class RandomWalkParams:
    """
    Run-and-tumble settings. Turns are single-wheel pivots executed at
    ``turn_rate``: the pivoting wheel runs at turn_rate / c_omega, so the
    robot center moves on a short arc rather than turning in place.
    """

    mean_run_duration: float = DEFAULT_MEAN_RUN_DURATION
    turn_angle_range: float = DEFAULT_TURN_ANGLE_RANGE
    turn_rate: float = DEFAULT_TURN_RATE
    nominal_rate: float = DEFAULT_NOMINAL_RATE
    c_omega: float = DEFAULT_C_OMEGA

    def __post_init__(self):
        if self.mean_run_duration <= 0:
            raise ConfigError(f"mean_run_duration must be positive, got {self.mean_run_duration}")
        if not 0.0 < self.turn_angle_range <= math.pi:
            raise ConfigError(f"turn_angle_range must lie in (0, pi], got {self.turn_angle_range}")
        if self.turn_rate <= 0:
            raise ConfigError(f"turn_rate must be positive, got {self.turn_rate}")
        if self.c_omega <= 0:
            raise ConfigError(f"c_omega must be positive, got {self.c_omega}")
        _check_rate("nominal_rate", self.nominal_rate)
        _check_rate("turn_rate / c_omega", self.pivot_rate)

    @property
    def pivot_rate(self) -> float:
        """Motor rate of the pivoting wheel."""
        return self.turn_rate / self.c_omega


@dataclass(frozen=True)
class RandomWalkState:
    """Run-and-tumble state; ``bout_duration`` is the last drawn bout length."""

    mode: str = Mode.TURNING
    mode_timer: float = 0.0
    turn_direction: str = Turn.LEFT
    bout_duration: float = 0.0


def random_walk_step(
    state: RandomWalkState,
    params: RandomWalkParams,
    rng: DecisionStream,
    dt: float,
) -> Tuple[MotorCommand, RandomWalkState]:
    """
    Alternate exponential straight runs with pivot turns through a uniform angle.

    Random draws happen only at bout boundaries. A turn lasts
    round(|angle| / turn_rate / dt) steps; turns that round to zero steps are
    skipped and a new run starts right away.
    """
    if state.mode_timer <= _EPS:
        if state.mode == Mode.FORWARD:
            angle = rng.symmetric(params.turn_angle_range)
            steps = int(round(abs(angle) / params.turn_rate / dt))
            direction = Turn.LEFT if angle > 0 else Turn.RIGHT
            state = RandomWalkState(
                Mode.TURNING, steps * dt, direction, abs(angle) / params.turn_rate
            )
        if state.mode == Mode.TURNING and state.mode_timer <= _EPS:
            run = rng.exponential(params.mean_run_duration)
            state = RandomWalkState(Mode.FORWARD, run, state.turn_direction, run)

    if state.mode == Mode.FORWARD:
        cmd = MotorCommand(params.nominal_rate, params.nominal_rate)
    else:
        cmd = turn_command(state.turn_direction, params.pivot_rate)
    return cmd, replace(state, mode_timer=max(0.0, state.mode_timer - dt))


def straight_step(nominal: float = DEFAULT_NOMINAL_RATE) -> MotorCommand:
    return MotorCommand(nominal, nominal)


class StraightController:
    """Constant equal motor command."""

    def __init__(self, nominal: float = DEFAULT_NOMINAL_RATE):
        self.nominal = nominal
        self.halted = False

    def command(self, pose: Pose, dt: float) -> MotorCommand:
        return straight_step(self.nominal)


class PhototaxisController:
    """Samples the light field at the robot position and runs `phototaxis_step`."""

    def __init__(self, light: LightField, params: PhototaxisParams, rng: DecisionStream,
                 state: Optional[ControllerState] = None):
        self.light = light
        self.params = params
        self.rng = rng
        self.state = state or ControllerState()
        self.left_turns = 0
        self.right_turns = 0

    @property
    def halted(self) -> bool:
        return self.state.mode == Mode.STOPPED

    def command(self, pose: Pose, dt: float) -> MotorCommand:
        reading = sample_intensity(self.light, (pose.x, pose.y))
        previous_mode = self.state.mode
        previous_timer = self.state.mode_timer
        cmd, self.state = phototaxis_step(self.state, self.params, reading, self.rng, dt)
        # count bouts, not steps
        entered_turn = previous_mode != Mode.TURNING or previous_timer <= _EPS
        if self.state.mode == Mode.TURNING and entered_turn:
            if self.state.turn_direction == Turn.RIGHT:
                self.right_turns += 1
            else:
                self.left_turns += 1
        return cmd


class RandomWalkController:
    def __init__(self, params: RandomWalkParams, rng: DecisionStream,
                 state: Optional[RandomWalkState] = None):
        self.params = params
        self.rng = rng
        self.state = state or RandomWalkState()
        self.halted = False

    def command(self, pose: Pose, dt: float) -> MotorCommand:
        cmd, self.state = random_walk_step(self.state, self.params, self.rng, dt)
        return cmd


@dataclass(frozen=True)
class ControllerSpec:
    """Controller selection as read from the experiment config."""

    kind: str = ControllerKind.STRAIGHT
    nominal_rate: float = DEFAULT_NOMINAL_RATE
    phototaxis: PhototaxisParams = field(default_factory=PhototaxisParams)
    random_walk: RandomWalkParams = field(default_factory=RandomWalkParams)

    def __post_init__(self):
        if self.kind not in ControllerKind.ALL:
            raise ConfigError(
                f"unknown controller '{self.kind}', expected one of {', '.join(ControllerKind.ALL)}"
            )

    def mirrored(self) -> "ControllerSpec":
        return replace(self, phototaxis=self.phototaxis.mirrored())


def build_controller(spec: ControllerSpec, light: LightField, decisions: DecisionStream):
    """Fresh controller for one trial."""
    if spec.kind == ControllerKind.PHOTOTAXIS:
        return PhototaxisController(light, spec.phototaxis, decisions)
    if spec.kind == ControllerKind.RANDOM_WALK:
        return RandomWalkController(spec.random_walk, decisions)
    return StraightController(spec.nominal_rate)
