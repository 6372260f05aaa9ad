"""
Shared domain value types: poses, motor commands and trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from .constants import DEFAULT_MAX_RATE, TRAJECTORY_COLUMNS
from .exceptions import InsufficientDataError, KiloswarmError

TWO_PI = 2.0 * math.pi


def wrap_angle(theta: float) -> float:
    """Normalize an angle to (-pi, pi]."""
    wrapped = math.remainder(theta, TWO_PI)
    if wrapped <= -math.pi:
        wrapped += TWO_PI
    return wrapped


def wrap_angles(theta: np.ndarray) -> np.ndarray:
    """Vectorized `wrap_angle`."""
    wrapped = np.remainder(theta + math.pi, TWO_PI) - math.pi
    wrapped[wrapped <= -math.pi] += TWO_PI
    return wrapped


@dataclass(frozen=True)
class Pose:
    """Robot state in the plane: position in meters, heading in radians."""

    x: float
    y: float
    theta: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.theta)):
            raise KiloswarmError(f"non-finite pose ({self.x}, {self.y}, {self.theta})")


@dataclass(frozen=True)
class MotorCommand:
    """Nominal right/left motor rates requested by a controller."""

    m_r: float
    m_l: float

    def validate(self, m_max: float = DEFAULT_MAX_RATE) -> "MotorCommand":
        if not (0.0 <= self.m_r <= m_max and 0.0 <= self.m_l <= m_max):
            raise KiloswarmError(
                f"motor command ({self.m_r}, {self.m_l}) outside [0, {m_max}]"
            )
        return self


STOP = MotorCommand(0.0, 0.0)


class Trajectory:
    """
    Uniformly sampled pose series starting at t = 0.

    ``theta`` is None for position-only logs (e.g. ingested from tracking
    data); every simulated trajectory carries headings.
    """

    def __init__(
        self,
        dt: float,
        x: Sequence[float],
        y: Sequence[float],
        theta: Optional[Sequence[float]] = None,
    ):
        if dt <= 0:
            raise KiloswarmError(f"trajectory dt must be positive, got {dt}")
        self.dt = float(dt)
        self.x = np.asarray(x, dtype=float)
        self.y = np.asarray(y, dtype=float)
        self.theta = None if theta is None else np.asarray(theta, dtype=float)
        if self.x.ndim != 1 or len(self.x) == 0:
            raise InsufficientDataError("trajectory must contain at least one sample")
        theta_ok = self.theta is None or len(self.theta) == len(self.x)
        if len(self.y) != len(self.x) or not theta_ok:
            raise KiloswarmError("trajectory columns differ in length")
        self.t = np.arange(len(self.x)) * self.dt

    @classmethod
    def from_frame(cls, frame: pd.DataFrame, dt: Optional[float] = None) -> "Trajectory":
        """Build from a ``t,x,y[,theta]`` table; dt is inferred from t when omitted."""
        t = frame["t"].to_numpy(dtype=float)
        if len(t) == 0:
            raise InsufficientDataError("empty trajectory table")
        if dt is None:
            if len(t) < 2:
                raise InsufficientDataError("cannot infer dt from a single sample")
            steps = np.diff(t)
            dt = float(np.mean(steps))
            if np.any(steps <= 0) or not np.allclose(steps, dt, rtol=1e-6, atol=1e-9):
                raise KiloswarmError("trajectory timestamps are not uniformly spaced")
        if abs(t[0]) > 1e-9:
            raise KiloswarmError(f"trajectory must start at t = 0, got {t[0]}")
        theta = frame["theta"].to_numpy(dtype=float) if "theta" in frame.columns else None
        return cls(dt, frame["x"].to_numpy(dtype=float), frame["y"].to_numpy(dtype=float), theta)

    def to_frame(self) -> pd.DataFrame:
        data = {"t": self.t, "x": self.x, "y": self.y}
        if self.theta is not None:
            data["theta"] = self.theta
        columns = [c for c in TRAJECTORY_COLUMNS if c in data]
        return pd.DataFrame(data, columns=columns)

    @property
    def has_headings(self) -> bool:
        return self.theta is not None

    @property
    def positions(self) -> np.ndarray:
        return np.column_stack([self.x, self.y])

    def pose(self, index: int) -> Pose:
        theta = 0.0 if self.theta is None else float(self.theta[index])
        return Pose(float(self.x[index]), float(self.y[index]), theta)

    @property
    def final_pose(self) -> Pose:
        return self.pose(-1)

    def __len__(self) -> int:
        return len(self.x)

    def __repr__(self) -> str:
        return f"Trajectory(n={len(self)}, dt={self.dt})"
