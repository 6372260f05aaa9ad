"""
Heading-bias estimation from trajectories: per-robot (individual) models,
the pooled one-fits-all (ensemble) model, and a least-squares circle fit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..core.constants import (
    DEFAULT_C_OMEGA,
    DEFAULT_C_V,
    DEFAULT_DT,
    DEFAULT_DURATION,
    DEFAULT_NOMINAL_RATE,
    DEFAULT_SIGMA_MOTOR,
    DELTA_MAX,
    ESTIMATE_COLUMNS,
    FLEET_STREAM_KEY,
)
from ..core.exceptions import DegenerateFitError, InsufficientDataError, UnestimableError
from ..core.types import Pose, Trajectory, wrap_angles
from ..utils.logger import get_logger
from ..utils.rng import derived_rng, trial_streams
from .controllers import StraightController
from .kinematics import RobotParams, simulate_trajectory, step_count

logger = get_logger()


@dataclass(frozen=True)
class TrialRecord:
    robot_id: int
    trial_id: int
    trajectory: Trajectory


@dataclass(frozen=True)
class BiasEstimate:
    robot_id: int
    mu_i: float
    sigma_i: float
    n_trials: int

    @property
    def side(self) -> str:
        """Turning tendency: counter-clockwise (positive) rates turn left."""
        if self.mu_i > 0:
            return "left"
        if self.mu_i < 0:
            return "right"
        return "none"


@dataclass(frozen=True)
class EnsembleModel:
    mu: float
    sigma: float
    n_trials_total: int


@dataclass(frozen=True)
class ModelComparison:
    mean_sigma_i: float
    sigma_ensemble: float
    ratio: float
    fraction_below: float

    def to_dict(self):
        return {
            "mean_sigma_i": self.mean_sigma_i,
            "sigma_ensemble": self.sigma_ensemble,
            "ratio": self.ratio,
            "fraction_below": self.fraction_below,
        }


def trial_turning_rate(trajectory: Trajectory) -> float:
    """
    Mean turning rate of one trial in rad/s.

    With headings: mean of wrapped heading increments over dt. Position-only
    logs use segment directions instead; zero-length segments carry no
    heading and are skipped, the elapsed time between the first and last
    usable segment is kept.
    """
    if len(trajectory) < 3:
        raise InsufficientDataError(
            f"turning rate needs at least 3 samples, got {len(trajectory)}"
        )
    dx = np.diff(trajectory.x)
    dy = np.diff(trajectory.y)
    moving = np.flatnonzero((dx != 0) | (dy != 0))
    if len(moving) == 0:
        raise UnestimableError("degenerate trajectory: all positions are identical")
    if trajectory.has_headings:
        increments = wrap_angles(np.diff(trajectory.theta))
        return float(np.mean(increments) / trajectory.dt)

    if len(moving) < 2:
        raise UnestimableError("position-only trajectory has a single moving segment")
    headings = np.arctan2(dy[moving], dx[moving])
    span = moving[-1] - moving[0]
    return float(np.sum(wrap_angles(np.diff(headings))) / (trajectory.dt * span))


def _rate_table(records: Iterable[TrialRecord]) -> pd.DataFrame:
    rows = [(r.robot_id, r.trial_id, trial_turning_rate(r.trajectory)) for r in records]
    if not rows:
        raise UnestimableError("no trial records to fit")
    return pd.DataFrame(rows, columns=["robot_id", "trial_id", "rate"])


def fit_individual(records: Iterable[TrialRecord]) -> List[BiasEstimate]:
    """Per-robot mean and sample std of trial turning rates, sorted by mu_i."""
    table = _rate_table(records)
    grouped = table.groupby("robot_id")["rate"].agg(["mean", "std", "count"])
    grouped["std"] = grouped["std"].fillna(0.0)
    estimates = [
        BiasEstimate(int(robot_id), float(row["mean"]), float(row["std"]), int(row["count"]))
        for robot_id, row in grouped.iterrows()
    ]
    return sorted(estimates, key=lambda e: (e.mu_i, e.robot_id))


def fit_ensemble(records: Iterable[TrialRecord]) -> EnsembleModel:
    """Mean and sample std of all trial turning rates pooled across robots."""
    rates = _rate_table(records)["rate"].to_numpy()
    if len(rates) < 2:
        raise UnestimableError(f"ensemble fit needs at least 2 trials, got {len(rates)}")
    return EnsembleModel(float(np.mean(rates)), float(np.std(rates, ddof=1)), len(rates))


def compare_models(individual: Sequence[BiasEstimate], ensemble: EnsembleModel) -> ModelComparison:
    sigmas = np.array([e.sigma_i for e in individual], dtype=float)
    mean_sigma = float(np.mean(sigmas)) if len(sigmas) else math.nan
    ratio = mean_sigma / ensemble.sigma if ensemble.sigma > 0 else math.nan
    fraction = float(np.mean(sigmas < ensemble.sigma)) if len(sigmas) else math.nan
    return ModelComparison(mean_sigma, ensemble.sigma, ratio, fraction)


def estimates_frame(estimates: Sequence[BiasEstimate]) -> pd.DataFrame:
    return pd.DataFrame(
        [(e.robot_id, e.mu_i, e.sigma_i, e.n_trials) for e in estimates],
        columns=ESTIMATE_COLUMNS,
    )


def circle_fit(positions) -> Tuple[Tuple[float, float], float]:
    """
    Algebraic (Kasa) least-squares circle fit.

    Solves x^2 + y^2 + D x + E y + F = 0 in the least-squares sense on
    mean-centered coordinates.
    """
    points = np.asarray(positions, dtype=float)
    if points.ndim != 2 or points.shape[1] != 2 or len(points) < 3:
        raise DegenerateFitError("circle fit needs at least 3 points in the plane")
    mean = points.mean(axis=0)
    x = points[:, 0] - mean[0]
    y = points[:, 1] - mean[1]
    design = np.column_stack([x, y, np.ones_like(x)])
    rhs = -(x * x + y * y)
    solution, _, rank, _ = np.linalg.lstsq(design, rhs, rcond=None)
    if rank < 3:
        raise DegenerateFitError("points are collinear; no unique circle")
    d, e, f = solution
    cx, cy = -d / 2.0, -e / 2.0
    radius_sq = cx * cx + cy * cy - f
    if radius_sq <= 0:
        raise DegenerateFitError("circle fit produced a non-positive squared radius")
    return (float(cx + mean[0]), float(cy + mean[1])), float(math.sqrt(radius_sq))


def simulate_turning_model(
    mu: float,
    sigma: float,
    duration: float,
    dt: float,
    rng: np.random.Generator,
    speed: float = 2.0 * DEFAULT_C_V * DEFAULT_NOMINAL_RATE,
    initial: Optional[Pose] = None,
) -> Trajectory:
    """
    Trajectory under a pure turning-rate noise model: one rate ~ Normal(mu, sigma^2)
    per step, constant speed.
    """
    if sigma < 0:
        raise UnestimableError(f"sigma must be >= 0, got {sigma}")
    initial = initial or Pose(0.0, 0.0, 0.0)
    n_steps = step_count(duration, dt)
    rates = mu + sigma * rng.standard_normal(n_steps)
    theta = initial.theta + np.concatenate([[0.0], np.cumsum(rates * dt)])
    x = initial.x + np.concatenate([[0.0], np.cumsum(speed * np.cos(theta[:-1]) * dt)])
    y = initial.y + np.concatenate([[0.0], np.cumsum(speed * np.sin(theta[:-1]) * dt)])
    return Trajectory(dt, x, y, wrap_angles(theta))


def synthetic_fleet(
    n_robots: int,
    n_trials: int,
    master_seed: int,
    duration: float = DEFAULT_DURATION,
    dt: float = DEFAULT_DT,
    sigma_motor: float = DEFAULT_SIGMA_MOTOR,
    delta_max: float = DELTA_MAX,
    c_v: float = DEFAULT_C_V,
    c_omega: float = DEFAULT_C_OMEGA,
) -> Tuple[List[TrialRecord], np.ndarray]:
    """
    Straight-line logs of a fleet with biases ~ Uniform(-delta_max, delta_max).

    Returns the records and the true bias per robot.
    """
    deltas = derived_rng(master_seed, FLEET_STREAM_KEY).uniform(-delta_max, delta_max, n_robots)
    records = []
    for robot_id, delta in enumerate(deltas):
        params = RobotParams(c_v=c_v, c_omega=c_omega, delta=float(delta),
                             sigma_motor=sigma_motor, delta_max=delta_max)
        for trial_id in range(n_trials):
            streams = trial_streams(master_seed, robot_id, trial_id)
            trajectory = simulate_trajectory(Pose(0.0, 0.0, 0.0), StraightController(), params,
                                             duration, dt, streams.motor)
            records.append(TrialRecord(robot_id, trial_id, trajectory))
    logger.debug(f"Synthetic fleet: {n_robots} robots x {n_trials} trials")
    return records, deltas


def self_check(
    n_robots: int,
    n_trials: int,
    master_seed: int,
    **fleet_kwargs,
) -> Tuple[pd.DataFrame, dict]:
    """
    Fit a synthetic fleet with known biases and score the recovery.

    Returns a per-robot table (true bias, expected rate 2 c_omega delta,
    estimate, error) and a summary with the RMSE and the model comparison.
    """
    c_omega = fleet_kwargs.get("c_omega", DEFAULT_C_OMEGA)
    records, deltas = synthetic_fleet(n_robots, n_trials, master_seed, **fleet_kwargs)
    estimates = sorted(fit_individual(records), key=lambda e: e.robot_id)
    expected = 2.0 * c_omega * deltas
    mu = np.array([e.mu_i for e in estimates])
    table = pd.DataFrame({
        "robot_id": np.arange(n_robots),
        "delta": deltas,
        "expected_mu": expected,
        "mu_i": mu,
        "sigma_i": [e.sigma_i for e in estimates],
        "error": mu - expected,
    })
    summary = {
        "n_robots": n_robots,
        "n_trials": n_trials,
        "rmse": float(np.sqrt(np.mean((mu - expected) ** 2))),
        "max_abs_error": float(np.max(np.abs(mu - expected))),
    }
    if len(records) >= 2:
        summary.update(compare_models(estimates, fit_ensemble(records)).to_dict())
    logger.info(f"Self-check on {n_robots} x {n_trials} synthetic trials: "
                f"rmse={summary['rmse']:.3g} rad/s")
    return table, summary
