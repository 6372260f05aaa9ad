"""
Monte Carlo sweeps over heading bias with shared initial conditions, plus the
cost, coverage and acceptability metrics computed from the trial table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from ..core.constants import (
    ACCEPTABILITY_COLUMNS,
    COST_WINDOW,
    COVERAGE_COLUMNS,
    DEFAULT_CELL_SIZE,
    DEFAULT_DELTA_ACC,
    DEFAULT_DT,
    DEFAULT_DURATION,
    INITIALS_STREAM_KEY,
    KILOBOT_RADIUS,
    MEAN_COST_COLUMNS,
    RESULT_COLUMNS,
    ControllerKind,
)
from ..core.exceptions import ConfigError, InsufficientDataError
from ..core.types import Pose, Trajectory, wrap_angle
from ..models.data_manager import DataManager, PathLike
from ..utils.logger import get_logger
from ..utils.rng import derived_rng, trial_streams
from .controllers import ControllerSpec, build_controller
from .environment import (
    Arena,
    CoverageGrid,
    LightField,
    coverage_fraction,
    coverage_summary,
    mark_path,
)
from .kinematics import RobotParams, simulate_trajectory

logger = get_logger()


def bias_grid(lo: float, hi: float, n: int) -> Tuple[float, ...]:
    """n evenly spaced biases over [lo, hi]."""
    if n < 1:
        raise ConfigError(f"bias grid needs at least one point, got {n}")
    if n == 1:
        return (0.5 * (lo + hi),)
    return tuple(float(b) for b in np.linspace(lo, hi, n))


@dataclass(frozen=True)
class CoverageSpec:
    cell_size: float = DEFAULT_CELL_SIZE
    footprint_radius: float = KILOBOT_RADIUS
    # None: only for random-walk sweeps
    enabled: Optional[bool] = None
    # write one raster per trial next to the coverage table
    export: bool = False

    def __post_init__(self):
        if self.cell_size <= 0 or self.footprint_radius <= 0:
            raise ConfigError("coverage cell_size and footprint_radius must be positive",
                              section="coverage")


@dataclass(frozen=True)
class ExperimentConfig:
    biases: Tuple[float, ...]
    n_mc: int = 1
    duration: float = DEFAULT_DURATION
    dt: float = DEFAULT_DT
    controller: ControllerSpec = field(default_factory=ControllerSpec)
    robot: RobotParams = field(default_factory=RobotParams)
    light: LightField = field(default_factory=LightField)
    arena: Arena = field(default_factory=Arena.centered)
    bounded: bool = True
    coverage: CoverageSpec = field(default_factory=CoverageSpec)
    master_seed: int = 0
    mirror: bool = False

    def __post_init__(self):
        object.__setattr__(self, "biases", tuple(float(b) for b in self.biases))
        if len(self.biases) < 1:
            raise ConfigError("experiment needs at least one robot", section="experiment")
        if self.n_mc < 1:
            raise ConfigError(f"n_mc must be >= 1, got {self.n_mc}", section="experiment")
        if self.dt <= 0 or self.duration < self.dt:
            raise ConfigError(
                f"need dt > 0 and duration >= dt, got dt={self.dt}, duration={self.duration}",
                section="experiment",
            )
        worst = max(abs(b) for b in self.biases)
        if worst > self.robot.delta_max:
            raise ConfigError(
                f"bias {worst} outside [-{self.robot.delta_max}, {self.robot.delta_max}]",
                section="experiment",
            )

    @property
    def n_robots(self) -> int:
        return len(self.biases)

    @property
    def n_trials(self) -> int:
        return self.n_robots * self.n_mc

    @property
    def coverage_enabled(self) -> bool:
        if self.coverage.enabled is None:
            return self.controller.kind == ControllerKind.RANDOM_WALK
        return self.coverage.enabled

    def robot_params(self, robot_id: int) -> RobotParams:
        return replace(self.robot, delta=self.biases[robot_id])


def mirrored_config(config: ExperimentConfig) -> ExperimentConfig:
    """
    Left/right exchange: negated biases (robot ids kept), p_right <- 1 - p_right,
    reflected initial poses and reflected random streams.
    """
    return replace(
        config,
        biases=tuple(-b for b in config.biases),
        controller=config.controller.mirrored(),
        mirror=not config.mirror,
    )


@dataclass(frozen=True)
class TrialResult:
    robot_id: int
    bias: float
    trial_id: int
    cost: float
    coverage: float
    stopped: bool
    final_pose: Pose

    def as_row(self) -> tuple:
        return (self.robot_id, self.bias, self.trial_id, self.cost, self.coverage, self.stopped,
                self.final_pose.x, self.final_pose.y, self.final_pose.theta)


@dataclass(frozen=True)
class AcceptabilityPoint:
    delta_acc: float
    r_acc: float
    n_acc: int


def shared_initials(config: ExperimentConfig,
                    rng: Optional[np.random.Generator] = None) -> List[Pose]:
    """
    n_mc initial poses drawn once from the master seed and reused by every robot.

    Positions are uniform over the arena, headings uniform over (-pi, pi].
    A mirrored experiment reflects them about the light field's horizontal axis.
    """
    rng = rng or derived_rng(config.master_seed, INITIALS_STREAM_KEY)
    arena = config.arena
    xs = rng.uniform(arena.x_min, arena.x_max, config.n_mc)
    ys = rng.uniform(arena.y_min, arena.y_max, config.n_mc)
    thetas = math.pi - rng.uniform(0.0, 2.0 * math.pi, config.n_mc)
    poses = [Pose(float(x), float(y), float(t)) for x, y, t in zip(xs, ys, thetas)]
    if config.mirror:
        axis = config.light.center[1]
        poses = [Pose(p.x, 2.0 * axis - p.y, wrap_angle(-p.theta)) for p in poses]
    return poses


def cost(trajectory: Trajectory, source_center: Tuple[float, float],
         window: int = COST_WINDOW) -> float:
    """Mean distance to the source center over the final ``window`` samples."""
    if len(trajectory) < window:
        raise InsufficientDataError(
            f"cost needs at least {window} samples, got {len(trajectory)}"
        )
    dx = trajectory.x[-window:] - source_center[0]
    dy = trajectory.y[-window:] - source_center[1]
    return float(np.mean(np.hypot(dx, dy)))


def coverage_grid(config: ExperimentConfig, trajectory: Trajectory) -> CoverageGrid:
    """Cells swept by the robot footprint at every trajectory sample."""
    grid = CoverageGrid(config.arena, config.coverage.cell_size)
    return mark_path(grid, trajectory.x, trajectory.y, config.coverage.footprint_radius)


def trial_coverage(config: ExperimentConfig, trajectory: Trajectory) -> float:
    return coverage_fraction(coverage_grid(config, trajectory))


def simulate_trial(config: ExperimentConfig, robot_id: int, trial_id: int, initial: Pose):
    """Trajectory of one (robot, trial) work item and the controller that drove it."""
    streams = trial_streams(config.master_seed, robot_id, trial_id, reflected=config.mirror)
    controller = build_controller(config.controller, config.light, streams.decisions)
    trajectory = simulate_trajectory(
        initial,
        controller,
        config.robot_params(robot_id),
        config.duration,
        config.dt,
        streams.motor,
        arena=config.arena if config.bounded else None,
    )
    return trajectory, controller


def _score_trial(config: ExperimentConfig, robot_id: int, trial_id: int,
                 initial: Pose) -> Tuple[TrialResult, Trajectory, Optional[CoverageGrid]]:
    trajectory, controller = simulate_trial(config, robot_id, trial_id, initial)
    if config.controller.kind == ControllerKind.RANDOM_WALK:
        trial_cost = math.nan
    else:
        trial_cost = cost(trajectory, config.light.center)
    grid = coverage_grid(config, trajectory) if config.coverage_enabled else None
    coverage = math.nan if grid is None else coverage_fraction(grid)
    result = TrialResult(robot_id, config.biases[robot_id], trial_id, trial_cost, coverage,
                         bool(controller.halted), trajectory.final_pose)
    return result, trajectory, grid


def run_trial(config: ExperimentConfig, robot_id: int, trial_id: int,
              initial: Pose) -> Tuple[TrialResult, Trajectory]:
    """Simulate one trial and score it."""
    result, trajectory, _ = _score_trial(config, robot_id, trial_id, initial)
    return result, trajectory


def coverage_image_name(robot_id: int, trial_id: int) -> str:
    return f"robot_{robot_id:03d}_trial_{trial_id:03d}.pgm"


def _run_robot(config: ExperimentConfig, robot_id: int, initials: Sequence[Pose],
               image_dir: Optional[str]) -> Tuple[List[tuple], List[tuple]]:
    rows = []
    coverage_rows = []
    images = None if image_dir is None else DataManager(image_dir)
    for trial_id, initial in enumerate(initials):
        result, _, grid = _score_trial(config, robot_id, trial_id, initial)
        rows.append(result.as_row())
        if grid is None:
            continue
        summary = coverage_summary(grid)
        coverage_rows.append((robot_id, trial_id, summary["cells_total"],
                              summary["cells_visited"], summary["fraction"]))
        if images is not None:
            images.write_image(grid.to_image(), coverage_image_name(robot_id, trial_id))
    return rows, coverage_rows


def _sweep(config: ExperimentConfig, workers: int,
           image_dir: Optional[str]) -> Tuple[pd.DataFrame, pd.DataFrame]:
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    initials = shared_initials(config)
    logger.info(
        f"Sweep: {config.n_robots} robots x {config.n_mc} trials "
        f"({config.controller.kind}, {workers} worker(s))"
    )
    chunks = Parallel(n_jobs=workers)(
        delayed(_run_robot)(config, robot_id, initials, image_dir)
        for robot_id in range(config.n_robots)
    )
    rows = [row for chunk, _ in chunks for row in chunk]
    coverage_rows = [row for _, chunk in chunks for row in chunk]
    results = pd.DataFrame(rows, columns=RESULT_COLUMNS)
    results = results.sort_values(["robot_id", "trial_id"], kind="mergesort").reset_index(drop=True)
    logger.info(f"Sweep finished: {len(results)} trials")
    return results, pd.DataFrame(coverage_rows, columns=COVERAGE_COLUMNS)


def run_sweep(config: ExperimentConfig, workers: int = 1) -> pd.DataFrame:
    """
    n_robots x n_mc trials, one row each, ordered by (robot_id, trial_id).

    Work is split per robot over ``workers`` processes; every trial draws
    from its own stream so the table does not depend on the worker count.
    """
    results, _ = _sweep(config, workers, None)
    return results


def run_coverage_sweep(config: ExperimentConfig, workers: int = 1,
                       image_dir: Optional[PathLike] = None) -> Tuple[pd.DataFrame, pd.DataFrame]:
    """
    `run_sweep` plus one coverage row per trial
    (robot_id, trial_id, cells_total, cells_visited, fraction).

    With ``image_dir`` every trial's raster is also saved there as a PGM
    named by `coverage_image_name`.
    """
    if not config.coverage_enabled:
        raise ConfigError("coverage is disabled for this experiment", section="coverage")
    return _sweep(config, workers, None if image_dir is None else str(image_dir))


def mean_cost_curve(results: pd.DataFrame, column: str = "cost") -> pd.DataFrame:
    """Per-bias mean of ``column`` over trials, ordered by bias."""
    if results.empty:
        raise InsufficientDataError("mean cost curve of an empty result table")
    curve = results.groupby("bias", sort=True)[column].mean().reset_index()
    curve.columns = ["bias", f"mean_{column}"]
    return curve if column != "cost" else curve[MEAN_COST_COLUMNS]


def bias_cell_widths(biases: Sequence[float]) -> np.ndarray:
    """Voronoi cell widths of sorted unique biases, clipped to the grid extent."""
    b = np.unique(np.asarray(biases, dtype=float))
    if len(b) < 2:
        return np.zeros(len(b))
    edges = np.concatenate([[b[0]], 0.5 * (b[1:] + b[:-1]), [b[-1]]])
    return np.diff(edges)


def acceptability(results: pd.DataFrame,
                  delta_acc: float = DEFAULT_DELTA_ACC) -> AcceptabilityPoint:
    """
    n_acc: trials with cost <= delta_acc. r_acc: total bias measure whose mean
    cost <= delta_acc (possibly disjoint intervals).
    """
    if delta_acc < 0:
        raise ConfigError(f"delta_acc must be >= 0, got {delta_acc}")
    n_acc = int((results["cost"] <= delta_acc).sum())
    curve = mean_cost_curve(results)
    widths = bias_cell_widths(curve["bias"])
    r_acc = float(widths[(curve["mean_cost"] <= delta_acc).to_numpy()].sum())
    return AcceptabilityPoint(float(delta_acc), r_acc, n_acc)


def acceptability_curves(results: pd.DataFrame, thresholds: Sequence[float]) -> pd.DataFrame:
    thresholds = [float(t) for t in thresholds]
    if any(b < a for a, b in zip(thresholds, thresholds[1:])):
        raise ConfigError("acceptability thresholds must be sorted ascending")
    points = [acceptability(results, t) for t in thresholds]
    return pd.DataFrame(
        [(p.delta_acc, p.r_acc, p.n_acc) for p in points], columns=ACCEPTABILITY_COLUMNS
    )


def threshold_grid(results: pd.DataFrame, n: int = 100,
                   include: float = DEFAULT_DELTA_ACC) -> np.ndarray:
    """
    Exactly n (>= 3) increasing thresholds from 0 to the largest observed cost.

    ``include`` replaces the nearest interior point unless it already lies on
    the grid; the end points are never moved.
    """
    if n < 3:
        raise ConfigError(f"a threshold grid needs at least 3 points, got {n}")
    top = max(float(results["cost"].max()), include)
    grid = np.linspace(0.0, top, n)
    if not np.any(np.isclose(grid, include, rtol=0.0, atol=1e-12)):
        k = int(np.argmin(np.abs(grid - include)))
        grid[min(max(k, 1), n - 2)] = include
    return grid


def ensemble_distribution(results: pd.DataFrame, column: str = "cost") -> Dict[str, object]:
    """
    Pooled quantiles (numpy's linear interpolation rule), mean and raw values.
    """
    values = results[column].dropna().to_numpy(dtype=float)
    if len(values) == 0:
        raise InsufficientDataError(f"no {column} values to summarize")
    q = np.quantile(values, [0.0, 0.25, 0.5, 0.75, 1.0])
    return {
        "min": float(q[0]),
        "q25": float(q[1]),
        "median": float(q[2]),
        "q75": float(q[3]),
        "max": float(q[4]),
        "mean": float(np.mean(values)),
        "values": values,
    }


@dataclass(frozen=True)
class GroupComparison:
    difference: float
    ci_low: float
    ci_high: float

    @property
    def excludes_zero(self) -> bool:
        return self.ci_low > 0 or self.ci_high < 0


def _bootstrap_means(values: np.ndarray, n_boot: int, rng: np.random.Generator) -> np.ndarray:
    picks = rng.integers(0, len(values), size=(n_boot, len(values)))
    return values[picks].mean(axis=1)


def compare_bias_groups(
    results: pd.DataFrame,
    column: str,
    mask_a,
    mask_b,
    n_boot: int = 2000,
    rng: Optional[np.random.Generator] = None,
) -> GroupComparison:
    """mean(a) - mean(b) of ``column`` with a 95% percentile bootstrap interval over trials."""
    rng = rng or np.random.default_rng(0)
    a = results.loc[mask_a, column].dropna().to_numpy(dtype=float)
    b = results.loc[mask_b, column].dropna().to_numpy(dtype=float)
    if len(a) == 0 or len(b) == 0:
        raise InsufficientDataError("both bias groups need at least one trial")
    diffs = _bootstrap_means(a, n_boot, rng) - _bootstrap_means(b, n_boot, rng)
    low, high = np.percentile(diffs, [2.5, 97.5])
    return GroupComparison(float(a.mean() - b.mean()), float(low), float(high))


def optimum_report(results: pd.DataFrame, n_boot: int = 2000,
                   rng: Optional[np.random.Generator] = None) -> Dict[str, float]:
    """Bias of minimum mean cost against the bias closest to zero, with bootstrap CIs."""
    rng = rng or np.random.default_rng(0)
    curve = mean_cost_curve(results)
    best = curve.loc[curve["mean_cost"].idxmin()]
    zero = curve.loc[curve["bias"].abs().idxmin()]

    def interval(bias):
        costs = results.loc[results["bias"] == bias, "cost"].to_numpy(dtype=float)
        return np.percentile(_bootstrap_means(costs, n_boot, rng), [2.5, 97.5])

    best_ci = interval(best["bias"])
    zero_ci = interval(zero["bias"])
    return {
        "best_bias": float(best["bias"]),
        "best_mean_cost": float(best["mean_cost"]),
        "best_ci_low": float(best_ci[0]),
        "best_ci_high": float(best_ci[1]),
        "zero_bias": float(zero["bias"]),
        "zero_mean_cost": float(zero["mean_cost"]),
        "zero_ci_low": float(zero_ci[0]),
        "zero_ci_high": float(zero_ci[1]),
        "separated": bool(best_ci[1] < zero_ci[0]),
    }
