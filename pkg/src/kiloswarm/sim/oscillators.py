"""
Clock-driven color-switching oscillators.

Each robot counts interrupt pulses at its natural rate; the counter wraps at
60 and the LED is red while the count is below 30, blue otherwise. Phases are
kept in pulse units; the Kuramoto view maps them to angles 2*pi*phase/60.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..core.constants import (
    DEFAULT_OSCILLATOR_DT,
    DEFAULT_PULSE_RATE,
    DEFAULT_PULSE_SPREAD,
    HISTORY_COLUMNS,
    ORDER_COLUMNS,
    PULSES_PER_COLOR,
    PULSES_PER_CYCLE,
    SWITCH_COLUMNS,
    Color,
    Topology,
)
from ..core.exceptions import ConfigError, InsufficientDataError, KiloswarmError
from ..core.types import TWO_PI

# pulses per radian
_PULSES_PER_RAD = PULSES_PER_CYCLE / TWO_PI


def color_of(phase: float) -> str:
    return Color.RED if phase < PULSES_PER_COLOR else Color.BLUE


def lattice_neighbors(n: int) -> np.ndarray:
    """Adjacency of an open-boundary square lattice (4-neighborhood), row-major."""
    side = int(math.isqrt(n))
    if side * side != n:
        raise ConfigError(f"lattice topology needs a perfect-square population, got {n}")
    adjacency = np.zeros((n, n), dtype=float)
    for row in range(side):
        for col in range(side):
            i = row * side + col
            if col + 1 < side:
                adjacency[i, i + 1] = adjacency[i + 1, i] = 1.0
            if row + 1 < side:
                adjacency[i, i + side] = adjacency[i + side, i] = 1.0
    return adjacency


@dataclass
class OscillatorPopulation:
    phases: np.ndarray
    natural_rates: np.ndarray
    coupling_strength: float = 0.0
    topology: str = Topology.ALL_TO_ALL
    adjacency: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        self.phases = _wrap_phases(np.asarray(self.phases, dtype=float))
        self.natural_rates = np.asarray(self.natural_rates, dtype=float)
        if self.phases.ndim != 1 or len(self.phases) < 1:
            raise ConfigError("an oscillator population needs at least one oscillator")
        if self.natural_rates.shape != self.phases.shape:
            raise ConfigError("phases and natural_rates differ in length")
        if self.coupling_strength < 0:
            raise ConfigError(f"coupling_strength must be >= 0, got {self.coupling_strength}")
        if self.topology not in Topology.ALL:
            raise ConfigError(f"unknown topology '{self.topology}'")
        if self.topology == Topology.LATTICE and self.adjacency is None:
            self.adjacency = lattice_neighbors(len(self.phases))

    def __len__(self) -> int:
        return len(self.phases)

    @property
    def angles(self) -> np.ndarray:
        return self.phases / _PULSES_PER_RAD


def make_population(
    n: int,
    rng: np.random.Generator,
    pulse_rate: float = DEFAULT_PULSE_RATE,
    spread: float = DEFAULT_PULSE_SPREAD,
    coupling_strength: float = 0.0,
    topology: str = Topology.ALL_TO_ALL,
    synchronized: bool = True,
) -> OscillatorPopulation:
    """Natural rates ~ Normal(pulse_rate, spread^2); phase 0 or uniform start."""
    if n < 1:
        raise ConfigError(f"population size must be >= 1, got {n}")
    if spread < 0:
        raise ConfigError(f"frequency spread must be >= 0, got {spread}")
    rates = pulse_rate + spread * rng.standard_normal(n)
    if synchronized:
        phases = np.zeros(n)
    else:
        phases = rng.uniform(0.0, PULSES_PER_CYCLE, size=n)
    return OscillatorPopulation(phases, rates, coupling_strength, topology)


def _wrap_phases(phases: np.ndarray) -> np.ndarray:
    wrapped = np.mod(phases, PULSES_PER_CYCLE)
    # np.mod of a tiny negative value rounds up to the modulus itself
    wrapped[wrapped >= PULSES_PER_CYCLE] = 0.0
    return wrapped


def advance_uncoupled(pop: OscillatorPopulation, dt: float) -> OscillatorPopulation:
    if dt <= 0:
        raise KiloswarmError(f"dt must be positive, got {dt}")
    return replace(pop, phases=_wrap_phases(pop.phases + dt * pop.natural_rates))


def coupling_drift(pop: OscillatorPopulation) -> np.ndarray:
    """(K / n_i) * sum_j sin(theta_j - theta_i) per oscillator, in rad/s."""
    theta = pop.angles
    sin_t, cos_t = np.sin(theta), np.cos(theta)
    if pop.topology == Topology.LATTICE:
        sum_sin = pop.adjacency @ sin_t
        sum_cos = pop.adjacency @ cos_t
        degree = pop.adjacency.sum(axis=1)
    else:
        # all-to-all counts the oscillator itself: two oscillators lock at arcsin(dw / K)
        sum_sin = np.full_like(theta, sin_t.sum())
        sum_cos = np.full_like(theta, cos_t.sum())
        degree = np.full_like(theta, float(len(theta)))
    interaction = cos_t * sum_sin - sin_t * sum_cos
    scaled = np.divide(interaction, degree, out=np.zeros_like(interaction), where=degree > 0)
    return pop.coupling_strength * scaled


def max_stable_dt(pop: OscillatorPopulation) -> float:
    """Largest dt keeping the per-step phase advance below one pulse."""
    bound = float(np.max(np.abs(pop.natural_rates))) + _PULSES_PER_RAD * pop.coupling_strength
    return math.inf if bound == 0 else 1.0 / bound


def advance_coupled(pop: OscillatorPopulation, dt: float) -> OscillatorPopulation:
    """One explicit Euler step of the Kuramoto dynamics (synchronous update)."""
    if dt <= 0:
        raise KiloswarmError(f"dt must be positive, got {dt}")
    if dt >= max_stable_dt(pop):
        raise KiloswarmError(
            f"dt = {dt} advances phases by a pulse or more per step; "
            f"use dt < {max_stable_dt(pop):.6g}"
        )
    rates = pop.natural_rates + _PULSES_PER_RAD * coupling_drift(pop)
    return replace(pop, phases=_wrap_phases(pop.phases + dt * rates))


@dataclass
class PopulationHistory:
    """Recorded phases, one row per sample time."""

    t: np.ndarray
    phases: np.ndarray
    natural_rates: np.ndarray

    @property
    def blue(self) -> np.ndarray:
        return self.phases >= PULSES_PER_COLOR

    def to_frame(self) -> pd.DataFrame:
        n_t, n = self.phases.shape
        return pd.DataFrame({
            "t": np.repeat(self.t, n),
            "osc_id": np.tile(np.arange(n), n_t),
            "phase": self.phases.ravel(),
            "color": [color_of(p) for p in self.phases.ravel()],
        })[HISTORY_COLUMNS]


def run_population(
    pop: OscillatorPopulation,
    duration: float,
    dt: float = DEFAULT_OSCILLATOR_DT,
    coupled: Optional[bool] = None,
    record_every: int = 1,
) -> PopulationHistory:
    """
    Fixed-step simulation from t = 0, recording every ``record_every`` steps.

    ``coupled`` defaults to whether the population has a non-zero coupling.
    """
    if dt <= 0 or duration < dt:
        raise KiloswarmError(f"need dt > 0 and duration >= dt, got dt={dt}, duration={duration}")
    if record_every < 1:
        raise ConfigError(f"record_every must be >= 1, got {record_every}")
    if coupled is None:
        coupled = pop.coupling_strength > 0
    advance = advance_coupled if coupled else advance_uncoupled
    n_steps = int(math.floor(duration / dt + 1e-9))
    times = [0.0]
    rows = [pop.phases.copy()]
    for k in range(1, n_steps + 1):
        pop = advance(pop, dt)
        if k % record_every == 0:
            times.append(k * dt)
            rows.append(pop.phases.copy())
    return PopulationHistory(np.asarray(times), np.vstack(rows), pop.natural_rates.copy())


def switch_count(colors: Sequence) -> int:
    """Number of samples whose color differs from the previous one."""
    colors = np.asarray(colors)
    if colors.size == 0:
        raise InsufficientDataError("switch_count needs a non-empty color history")
    return int(np.count_nonzero(colors[1:] != colors[:-1]))


def population_ratio(history) -> np.ndarray:
    """Blue fraction per sample; accepts a PopulationHistory or a (T, N) phase array."""
    phases = history.phases if isinstance(history, PopulationHistory) else np.asarray(history)
    phases = np.atleast_2d(phases)
    return np.mean(phases >= PULSES_PER_COLOR, axis=1)


def order_parameter(phases) -> float:
    """r = |mean(exp(i * theta))| for phases in pulses."""
    phases = np.asarray(phases, dtype=float)
    if phases.size == 0:
        raise InsufficientDataError("order parameter of an empty population")
    return float(np.abs(np.mean(np.exp(1j * phases / _PULSES_PER_RAD))))


def order_series(history: PopulationHistory) -> pd.DataFrame:
    r = np.abs(np.mean(np.exp(1j * history.phases / _PULSES_PER_RAD), axis=1))
    return pd.DataFrame({
        "t": history.t,
        "r": r,
        "blue_fraction": population_ratio(history),
    })[ORDER_COLUMNS]


def asymptotic_order(history: PopulationHistory, fraction: float = 0.25) -> float:
    """Mean order parameter over the final ``fraction`` of the run."""
    series = order_series(history)
    start = history.t[-1] * (1.0 - fraction)
    return float(series.loc[series["t"] >= start, "r"].mean())


def switch_table(history: PopulationHistory) -> pd.DataFrame:
    blue = history.blue
    return pd.DataFrame({
        "osc_id": np.arange(blue.shape[1]),
        "natural_rate": history.natural_rates,
        "switch_count": [switch_count(blue[:, i]) for i in range(blue.shape[1])],
    })[SWITCH_COLUMNS]


def switch_summary(histories: Sequence[PopulationHistory]) -> pd.DataFrame:
    """Switch counts per repetition, sorted ascending within each repetition."""
    parts = []
    for repetition, history in enumerate(histories):
        table = switch_table(history).sort_values(["switch_count", "osc_id"], kind="mergesort")
        table.insert(0, "repetition", repetition)
        table["rank"] = np.arange(len(table))
        parts.append(table)
    if not parts:
        raise InsufficientDataError("switch_summary needs at least one history")
    return pd.concat(parts, ignore_index=True)


def switch_distribution(histories: Sequence[PopulationHistory]) -> pd.DataFrame:
    """Switch counts pooled over all repetitions: how many oscillators made each count."""
    summary = switch_summary(histories)
    counts = summary["switch_count"].value_counts().sort_index()
    return pd.DataFrame({
        "switch_count": counts.index.to_numpy(dtype=int),
        "n_oscillators": counts.to_numpy(dtype=int),
        "fraction": counts.to_numpy(dtype=float) / len(summary),
    })


def coupling_sweep(
    base: OscillatorPopulation,
    coupling_values: Sequence[float],
    duration: float,
    dt: float = DEFAULT_OSCILLATOR_DT,
    record_every: int = 10,
) -> Tuple[pd.DataFrame, List[PopulationHistory]]:
    """
    Asymptotic order parameter for each coupling strength, all runs sharing the
    base population's natural rates and start phases. Returns the table and
    the recorded histories.
    """
    rows = []
    histories = []
    for k in coupling_values:
        history = run_population(replace(base, coupling_strength=float(k)), duration, dt,
                                 coupled=True, record_every=record_every)
        histories.append(history)
        rows.append((float(k), asymptotic_order(history)))
    return pd.DataFrame(rows, columns=["coupling", "order"]), histories
