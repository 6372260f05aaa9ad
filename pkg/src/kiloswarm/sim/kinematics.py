"""
Heading-biased, motor-noise-perturbed differential-drive kinematics.

Motor rates are perturbed at the motor level each control step:
    m~_R = m_R + delta + eta_R,   m~_L = m_L - delta + eta_L
then mapped to body velocities
    v = c_v (m~_R + m~_L),   omega = c_omega (m~_R - m~_L)
and integrated with explicit Euler.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Protocol, Tuple

from ..core.constants import (
    DEFAULT_C_OMEGA,
    DEFAULT_C_V,
    DEFAULT_NOMINAL_RATE,
    DEFAULT_SIGMA_MOTOR,
    DELTA_MAX,
)
from ..core.exceptions import ConfigError, KiloswarmError
from ..core.types import MotorCommand, Pose, Trajectory, wrap_angle, wrap_angles
from ..utils.rng import MotorNoise
from .environment import Arena, confine


@dataclass(frozen=True)
class RobotParams:
    """Per-individual actuation identity."""

    c_v: float = DEFAULT_C_V
    c_omega: float = DEFAULT_C_OMEGA
    delta: float = 0.0
    sigma_motor: float = DEFAULT_SIGMA_MOTOR
    delta_max: float = DELTA_MAX

    def __post_init__(self):
        if not (self.c_v > 0 and self.c_omega > 0):
            raise ConfigError(f"c_v and c_omega must be positive, got {self.c_v}, {self.c_omega}")
        if abs(self.delta) > self.delta_max:
            raise ConfigError(f"|delta| = {abs(self.delta)} exceeds delta_max = {self.delta_max}")
        if self.sigma_motor < 0:
            raise ConfigError(f"sigma_motor must be >= 0, got {self.sigma_motor}")

    @property
    def turning_rate(self) -> float:
        """Noiseless turning rate under equal motor commands (rad/s)."""
        return 2.0 * self.c_omega * self.delta

    def circle_radius(self, nominal: float = DEFAULT_NOMINAL_RATE) -> float:
        """Radius of the noiseless orbit under an equal command; inf without bias."""
        if self.delta == 0:
            return math.inf
        return abs(self.c_v * 2.0 * nominal / self.turning_rate)


class Controller(Protocol):
    halted: bool

    def command(self, pose: Pose, dt: float) -> MotorCommand:
        ...


def apply_bias_and_noise(
    cmd: MotorCommand, params: RobotParams, rng: MotorNoise
) -> Tuple[float, float]:
    """Effective (right, left) motor rates; never clamped."""
    z_r, z_l = rng.draw_pair()
    m_r = (cmd.m_r + params.delta) + params.sigma_motor * z_r
    m_l = (cmd.m_l - params.delta) + params.sigma_motor * z_l
    return m_r, m_l


def motor_to_velocity(rates: Tuple[float, float], params: RobotParams) -> Tuple[float, float]:
    m_r, m_l = rates
    return params.c_v * (m_r + m_l), params.c_omega * (m_r - m_l)


def step(pose: Pose, cmd: MotorCommand, params: RobotParams, dt: float, rng: MotorNoise) -> Pose:
    """
    One explicit Euler step; consumes exactly two noise draws.

    The nominal command must lie in [0, m_max] per motor; bias and noise are
    added afterwards and are not clamped.
    """
    if dt <= 0:
        raise KiloswarmError(f"dt must be positive, got {dt}")
    cmd.validate()
    v, omega = motor_to_velocity(apply_bias_and_noise(cmd, params, rng), params)
    return Pose(
        pose.x + v * math.cos(pose.theta) * dt,
        pose.y + v * math.sin(pose.theta) * dt,
        wrap_angle(pose.theta + omega * dt),
    )


def step_count(duration: float, dt: float) -> int:
    """floor(duration / dt), robust to representation error in dt."""
    return int(math.floor(duration / dt + 1e-9))


def simulate_trajectory(
    initial: Pose,
    controller: Controller,
    params: RobotParams,
    duration: float,
    dt: float,
    rng: MotorNoise,
    arena: Optional[Arena] = None,
) -> Trajectory:
    """
    Run a controller in closed loop for floor(duration / dt) steps.

    The controller is queried once per step with the current pose. Once it
    reports ``halted`` the pose is frozen (motors off) but the two noise draws
    of each step are still consumed so streams stay aligned across robots.
    Controller exceptions propagate unchanged.
    """
    if dt <= 0:
        raise KiloswarmError(f"dt must be positive, got {dt}")
    if duration < dt:
        raise KiloswarmError(f"duration {duration} shorter than one step of {dt}")

    n_steps = step_count(duration, dt)
    xs = [initial.x]
    ys = [initial.y]
    thetas = [initial.theta]
    pose = initial
    for _ in range(n_steps):
        cmd = controller.command(pose, dt)
        if controller.halted:
            rng.draw_pair()
        else:
            pose = step(pose, cmd, params, dt, rng)
            if arena is not None:
                pose = confine(arena, pose)
        xs.append(pose.x)
        ys.append(pose.y)
        thetas.append(pose.theta)
    return Trajectory(dt, xs, ys, thetas)


def mirror_trajectory(trajectory: Trajectory, center_y: float = 0.0) -> Trajectory:
    """Reflect a trajectory about the horizontal line y = center_y."""
    theta = None if trajectory.theta is None else wrap_angles(-trajectory.theta)
    return Trajectory(trajectory.dt, trajectory.x, 2.0 * center_y - trajectory.y, theta)
