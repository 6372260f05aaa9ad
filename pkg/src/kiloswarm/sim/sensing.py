"""
Per-individual light-sensor response, the saw-tooth stimulus sweep and
threshold-decision agreement.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from ..core.constants import RESPONSE_COLUMNS, SENSOR_MAX, SENSOR_MIN
from ..core.exceptions import ConfigError, InsufficientDataError


@dataclass(frozen=True)
class SensorModel:
    """Affine sensor with integer quantization onto [0, 1023]."""

    robot_id: int
    gain: float = 1.0
    offset: float = 0.0
    reading_noise: float = 0.0

    def __post_init__(self):
        if self.gain <= 0:
            raise ConfigError(f"sensor gain must be positive, got {self.gain}")
        if self.reading_noise < 0:
            raise ConfigError(f"reading_noise must be >= 0, got {self.reading_noise}")


@dataclass(frozen=True)
class StimulusProfile:
    repetitions: int = 4
    samples_per_rep: int = 100

    def __post_init__(self):
        if self.repetitions < 1 or self.samples_per_rep < 2:
            raise ConfigError("stimulus needs >= 1 repetition and >= 2 samples per repetition")

    @property
    def v_values(self) -> np.ndarray:
        """Saw-tooth: a 0 -> 1 ramp repeated ``repetitions`` times."""
        return np.tile(np.linspace(0.0, 1.0, self.samples_per_rep), self.repetitions)


def read(sensor: SensorModel, stimulus, rng: Optional[np.random.Generator] = None):
    """
    clamp(round(gain * stimulus + offset), 0, 1023); scalar or array stimulus.

    Rounding is numpy's round-half-to-even, so 2.5 reads as 2 and 3.5 as 4.
    """
    value = sensor.gain * np.asarray(stimulus, dtype=float) + sensor.offset
    if sensor.reading_noise > 0 and rng is not None:
        value = value + rng.normal(0.0, sensor.reading_noise, size=np.shape(value))
    reading = np.clip(np.rint(value), SENSOR_MIN, SENSOR_MAX).astype(int)
    return int(reading) if reading.ndim == 0 else reading


def sample_sensors(n: int, rng: np.random.Generator, gain_sd: float = 0.05,
                   offset_sd: float = 10.0, reading_noise: float = 0.0) -> List[SensorModel]:
    """Heterogeneous fleet: gain ~ Normal(1, gain_sd^2), offset ~ Normal(0, offset_sd^2)."""
    gains = rng.normal(1.0, gain_sd, size=n)
    offsets = rng.normal(0.0, offset_sd, size=n)
    # gains stay positive
    gains = np.where(gains > 0, gains, np.abs(gains) + 1e-6)
    return [
        SensorModel(robot_id=i, gain=float(g), offset=float(o), reading_noise=reading_noise)
        for i, (g, o) in enumerate(zip(gains, offsets))
    ]


def run_sweep(sensors: Sequence[SensorModel], profile: StimulusProfile,
              stimulus_scale: float = float(SENSOR_MAX),
              rng: Optional[np.random.Generator] = None) -> pd.DataFrame:
    """Response table with one row per (robot, sample)."""
    if not sensors:
        raise InsufficientDataError("sensor sweep needs at least one sensor")
    v = profile.v_values
    frames = []
    for sensor in sensors:
        frames.append(pd.DataFrame({
            "robot_id": sensor.robot_id,
            "sample_index": np.arange(len(v)),
            "v_value": v,
            "reading": read(sensor, v * stimulus_scale, rng),
        }))
    return pd.concat(frames, ignore_index=True)[RESPONSE_COLUMNS]


def response_matrix(table: pd.DataFrame) -> pd.DataFrame:
    """Pivot a response table to robots x samples."""
    return table.pivot(index="robot_id", columns="sample_index", values="reading")


def median_response(table: pd.DataFrame) -> pd.DataFrame:
    """Per-sample median, min and max over robots."""
    grouped = table.groupby("sample_index")["reading"]
    out = pd.DataFrame({
        "v_value": table.groupby("sample_index")["v_value"].first(),
        "median": grouped.median(),
        "min": grouped.min(),
        "max": grouped.max(),
    })
    return out.reset_index()


def trim_period(series, period: int, k: int = 0) -> np.ndarray:
    """Slice [k * period, (k + 1) * period) out of a periodic series."""
    series = np.asarray(series)
    if period < 1:
        raise ConfigError(f"period must be >= 1, got {period}")
    if k < 0 or len(series) < (k + 1) * period:
        raise InsufficientDataError(
            f"series of length {len(series)} has no period {k} of {period} samples"
        )
    return series[k * period:(k + 1) * period]


def trim_table(table: pd.DataFrame, period: int, k: int = 0) -> pd.DataFrame:
    """Apply `trim_period` to every robot's series, re-indexing samples from 0."""
    parts = []
    for robot_id, group in table.sort_values(["robot_id", "sample_index"]).groupby("robot_id"):
        patch = trim_period(group.to_numpy(), period, k)
        part = pd.DataFrame(patch, columns=group.columns)
        part["sample_index"] = np.arange(period)
        parts.append(part)
    out = pd.concat(parts, ignore_index=True)
    return out.astype({"robot_id": int, "sample_index": int, "v_value": float, "reading": int})


def agreement_count(readings, threshold: int) -> int:
    """Number of robots whose reading is at or above the threshold."""
    if not SENSOR_MIN <= threshold <= SENSOR_MAX + 1:
        raise ConfigError(f"threshold must lie in [0, 1024], got {threshold}")
    return int(np.count_nonzero(np.asarray(readings) >= threshold))


def agreement_curve(readings, thresholds: Optional[Sequence[int]] = None) -> pd.DataFrame:
    """Agreement count for every threshold (default: every integer 0..1024)."""
    if thresholds is None:
        thresholds = range(SENSOR_MIN, SENSOR_MAX + 2)
    thresholds = np.asarray(list(thresholds), dtype=int)
    return pd.DataFrame({
        "threshold": thresholds,
        "count": [agreement_count(readings, t) for t in thresholds],
    })


def agreement_matrix(table: pd.DataFrame, thresholds: Sequence[int]) -> pd.DataFrame:
    """Agreement counts for every (sample_index, threshold) pair."""
    matrix = response_matrix(table).to_numpy()
    thresholds = [int(t) for t in thresholds]
    rows = []
    for sample_index in range(matrix.shape[1]):
        column = matrix[:, sample_index]
        for threshold in thresholds:
            rows.append((sample_index, threshold, agreement_count(column, threshold)))
    return pd.DataFrame(rows, columns=["sample_index", "threshold", "count"])
