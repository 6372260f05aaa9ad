"""
Experiment configuration management for KiloSwarm.

Configs are sectioned INI files. Every key has a typed default; a file only
overrides what it names, and command-line overrides win over the file.
"""

import configparser
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

from ..sim.controllers import ControllerSpec, PhototaxisParams, RandomWalkParams
from ..sim.environment import Arena, LightField
from ..sim.harness import CoverageSpec, ExperimentConfig, bias_grid
from ..sim.kinematics import RobotParams
from ..utils.logger import get_logger
from .constants import (
    DEFAULT_ARENA_HALF_WIDTH,
    DEFAULT_C_OMEGA,
    DEFAULT_C_V,
    DEFAULT_CELL_SIZE,
    DEFAULT_DELTA_ACC,
    DEFAULT_DT,
    DEFAULT_DURATION,
    DEFAULT_FORWARD_DURATION,
    DEFAULT_MEAN_RUN_DURATION,
    DEFAULT_NOMINAL_RATE,
    DEFAULT_OSCILLATOR_DT,
    DEFAULT_P_RIGHT,
    DEFAULT_PEAK_INTENSITY,
    DEFAULT_POPULATION,
    DEFAULT_PULSE_RATE,
    DEFAULT_PULSE_SPREAD,
    DEFAULT_SAMPLE_PERIOD,
    DEFAULT_SIGMA_MOTOR,
    DEFAULT_STOP_THRESHOLD,
    DEFAULT_SUPPORT_RADIUS,
    DEFAULT_TURN_ANGLE_RANGE,
    DEFAULT_TURN_DURATION,
    DEFAULT_TURN_RATE,
    DELTA_MAX,
    KILOBOT_RADIUS,
    SENSOR_MAX,
    ControllerKind,
    Profile,
    Topology,
)
from .exceptions import ConfigError

logger = get_logger()

PathLike = Union[str, Path]

# Value kinds understood by the parser
INT, FLOAT, BOOL, STR, SEED, FLOATS, INTS, AUTO_BOOL = (
    "int", "float", "bool", "str", "seed", "floats", "ints", "auto_bool",
)

MANIFEST_SECTION = "manifest"

_TRUE = {"1", "yes", "true", "on"}
_FALSE = {"0", "no", "false", "off"}


def _schema() -> Dict[str, Dict[str, Tuple[str, Any]]]:
    """(kind, default) for every known key, by section."""
    return {
        "experiment": {
            "controller": (STR, ControllerKind.STRAIGHT),
            "seed": (SEED, None),
            "n_robots": (INT, 100),
            "bias_lo": (FLOAT, -DELTA_MAX),
            "bias_hi": (FLOAT, DELTA_MAX),
            "biases": (FLOATS, ()),
            "n_mc": (INT, 1),
            "duration": (FLOAT, DEFAULT_DURATION),
            "dt": (FLOAT, DEFAULT_DT),
            "workers": (INT, 1),
            "mirror": (BOOL, False),
            "random_start": (BOOL, False),
        },
        "robot": {
            "c_v": (FLOAT, DEFAULT_C_V),
            "c_omega": (FLOAT, DEFAULT_C_OMEGA),
            "sigma_motor": (FLOAT, DEFAULT_SIGMA_MOTOR),
            "delta_max": (FLOAT, DELTA_MAX),
            "nominal_rate": (FLOAT, DEFAULT_NOMINAL_RATE),
        },
        "phototaxis": {
            "p_right": (FLOAT, DEFAULT_P_RIGHT),
            "p_right_values": (FLOATS, ()),
            "forward_duration": (FLOAT, DEFAULT_FORWARD_DURATION),
            "turn_duration": (FLOAT, DEFAULT_TURN_DURATION),
            "sample_period": (FLOAT, DEFAULT_SAMPLE_PERIOD),
            "stop_threshold": (FLOAT, DEFAULT_STOP_THRESHOLD),
            "objective_intensity": (FLOAT, DEFAULT_PEAK_INTENSITY),
        },
        "random_walk": {
            "mean_run_duration": (FLOAT, DEFAULT_MEAN_RUN_DURATION),
            "turn_angle_range": (FLOAT, DEFAULT_TURN_ANGLE_RANGE),
            "turn_rate": (FLOAT, DEFAULT_TURN_RATE),
        },
        "environment": {
            "light_x": (FLOAT, 0.0),
            "light_y": (FLOAT, 0.0),
            "peak_intensity": (FLOAT, DEFAULT_PEAK_INTENSITY),
            "radius_of_support": (FLOAT, DEFAULT_SUPPORT_RADIUS),
            "profile": (STR, Profile.CONE),
            "arena_half_width": (FLOAT, DEFAULT_ARENA_HALF_WIDTH),
            "bounded": (BOOL, True),
            "start_x": (FLOAT, 0.0),
            "start_y": (FLOAT, 0.0),
            "start_theta": (FLOAT, 0.0),
        },
        "coverage": {
            "cell_size": (FLOAT, DEFAULT_CELL_SIZE),
            "footprint_radius": (FLOAT, KILOBOT_RADIUS),
            "enabled": (AUTO_BOOL, None),
            "export": (BOOL, False),
        },
        "sensing": {
            "n_sensors": (INT, 12),
            "repetitions": (INT, 4),
            "samples_per_rep": (INT, 100),
            "gain_sd": (FLOAT, 0.05),
            "offset_sd": (FLOAT, 10.0),
            "reading_noise": (FLOAT, 0.0),
            "stimulus_scale": (FLOAT, float(SENSOR_MAX)),
            "period_index": (INT, 0),
            "homogeneous": (BOOL, False),
            "thresholds": (INTS, ()),
        },
        "oscillators": {
            "n": (INT, DEFAULT_POPULATION),
            "pulse_rate": (FLOAT, DEFAULT_PULSE_RATE),
            "spread": (FLOAT, DEFAULT_PULSE_SPREAD),
            "coupling": (FLOAT, 0.0),
            "coupling_values": (FLOATS, ()),
            "topology": (STR, Topology.ALL_TO_ALL),
            "duration": (FLOAT, 600.0),
            "dt": (FLOAT, DEFAULT_OSCILLATOR_DT),
            "repetitions": (INT, 4),
            "record_every": (INT, 10),
            "synchronized": (BOOL, True),
        },
        "output": {
            "out_dir": (STR, "results"),
            "delta_acc": (FLOAT, DEFAULT_DELTA_ACC),
            "thresholds": (INT, 100),
            "n_boot": (INT, 2000),
        },
        "logging": {
            "level": (STR, "INFO"),
        },
    }


def _parse_value(kind: str, raw: str) -> Any:
    text = raw.strip()
    if kind == INT:
        return int(text)
    if kind == FLOAT:
        value = float(text)
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {text}")
        return value
    if kind == BOOL:
        lowered = text.lower()
        if lowered in _TRUE:
            return True
        if lowered in _FALSE:
            return False
        raise ValueError(f"expected a boolean, got '{text}'")
    if kind == AUTO_BOOL:
        return None if text.lower() in ("", "auto") else _parse_value(BOOL, text)
    if kind == SEED:
        if text == "":
            return None
        seed = int(text)
        if not 0 <= seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {text}")
        return seed
    if kind == FLOATS:
        return tuple(_parse_value(FLOAT, part) for part in text.split(",") if part.strip())
    if kind == INTS:
        return tuple(int(part) for part in text.split(",") if part.strip())
    return text


def _format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (tuple, list)):
        return ", ".join(_format_value(v) for v in value)
    return str(value)


def _without(section: Dict[str, Any], *keys: str) -> Dict[str, Any]:
    return {k: v for k, v in section.items() if k not in keys}


def _find_line(path: Optional[Path], section: str, key: Optional[str]) -> Optional[int]:
    """1-based line of `key` inside `[section]` (or of the section header)."""
    if path is None or not path.exists():
        return None
    current = None
    for number, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            current = stripped[1:-1].strip().lower()
            if key is None and current == section:
                return number
            continue
        if current == section and key is not None:
            name = stripped.split("=", 1)[0].split(":", 1)[0].strip().lower()
            if name == key:
                return number
    return None


class Config:
    """Resolved experiment configuration."""

    def __init__(self):
        self._config: Dict[str, Dict[str, Any]] = self._get_default_config()
        self.source: Optional[Path] = None

    @staticmethod
    def _get_default_config() -> Dict[str, Dict[str, Any]]:
        """Get default configuration."""
        return {
            section: {key: default for key, (_, default) in keys.items()}
            for section, keys in _schema().items()
        }

    @classmethod
    def from_file(cls, config_path: Optional[PathLike]) -> "Config":
        config = cls()
        if config_path is not None:
            config.load(config_path)
        return config

    def load(self, config_path: PathLike) -> None:
        """Load configuration from an INI file over the current values."""
        path = Path(config_path)
        self.source = path
        parser = configparser.ConfigParser(interpolation=None)
        try:
            with open(path, "r", encoding="utf-8") as f:
                parser.read_file(f)
        except OSError as e:
            raise ConfigError(f"cannot read config: {e}", source=path) from e
        except configparser.Error as e:
            line = getattr(e, "lineno", None)
            raise ConfigError(f"malformed config: {e.message}", source=path, line=line) from e

        schema = _schema()
        for section in parser.sections():
            if section == MANIFEST_SECTION:
                continue
            if section not in schema:
                raise ConfigError("unknown section", source=path, section=section,
                                  line=_find_line(path, section, None))
            for key, raw in parser.items(section):
                if key not in schema[section]:
                    raise ConfigError("unknown key", source=path, section=section, key=key,
                                      line=_find_line(path, section, key))
                kind, _ = schema[section][key]
                try:
                    self._config[section][key] = _parse_value(kind, raw)
                except ValueError as e:
                    raise ConfigError(f"invalid {kind} value '{raw}' ({e})", source=path,
                                      section=section, key=key,
                                      line=_find_line(path, section, key)) from e
        logger.debug(f"Loaded configuration from {path}")

    def save(self, config_path: PathLike, manifest: Optional[Dict[str, Any]] = None) -> None:
        """Save the resolved configuration, optionally with a [manifest] section."""
        parser = configparser.ConfigParser(interpolation=None)
        for section, values in self._config.items():
            parser[section] = {key: _format_value(value) for key, value in values.items()}
        if manifest:
            parser[MANIFEST_SECTION] = {k: _format_value(v) for k, v in manifest.items()}
        path = Path(config_path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                parser.write(f)
        except OSError as e:
            logger.error(f"Failed to save configuration: {e}")
            raise

    def get(self, key: str, default: Any = None) -> Any:
        """Get configuration value by dotted key, e.g. 'experiment.dt'."""
        try:
            section, name = key.split(".", 1)
            return self._config[section][name]
        except (KeyError, ValueError):
            return default

    def set(self, key: str, value: Any) -> None:
        """Set a configuration value by dotted key; strings are parsed by the key's type."""
        try:
            section, name = key.split(".", 1)
            kind, _ = _schema()[section][name]
        except (KeyError, ValueError):
            raise ConfigError(f"unknown configuration key '{key}'")
        if isinstance(value, str):
            try:
                value = _parse_value(kind, value)
            except ValueError as e:
                raise ConfigError(f"invalid {kind} value '{value}' ({e})",
                                  section=section, key=name) from e
        self._config[section][name] = value

    def apply_assignments(self, assignments) -> None:
        """Apply 'section.key=value' overrides."""
        for assignment in assignments or ():
            if "=" not in assignment:
                raise ConfigError(f"override '{assignment}' is not of the form section.key=value")
            key, value = assignment.split("=", 1)
            self.set(key.strip(), value.strip())

    def section(self, name: str) -> Dict[str, Any]:
        return dict(self._config[name])

    def as_dict(self) -> Dict[str, Dict[str, Any]]:
        return {section: dict(values) for section, values in self._config.items()}

    def __eq__(self, other) -> bool:
        return isinstance(other, Config) and self.as_dict() == other.as_dict()

    def _checked(self, section: str, build):
        """Run a parameter constructor, attaching file/section context to its ConfigError."""
        try:
            return build()
        except ConfigError as e:
            if e.section is not None:
                raise
            raise ConfigError(str(e), source=self.source, section=section,
                              line=_find_line(self.source, section, None)) from e

    def resolve_experiment(self):
        """Typed, validated experiment parameters for simulate/sweep."""
        exp = self._config["experiment"]
        robot = self._config["robot"]
        env = self._config["environment"]
        nominal = robot["nominal_rate"]

        robot_params = self._checked("robot", lambda: RobotParams(
            c_v=robot["c_v"], c_omega=robot["c_omega"], delta=0.0,
            sigma_motor=robot["sigma_motor"], delta_max=robot["delta_max"],
        ))
        photo = self._checked("phototaxis", lambda: PhototaxisParams(
            nominal_rate=nominal, **_without(self._config["phototaxis"], "p_right_values")
        ))
        walk = self._checked("random_walk", lambda: RandomWalkParams(
            nominal_rate=nominal, c_omega=robot["c_omega"], **self._config["random_walk"]
        ))
        controller = self._checked("experiment", lambda: ControllerSpec(
            exp["controller"], nominal, photo, walk
        ))
        center = (env["light_x"], env["light_y"])
        light = self._checked("environment", lambda: LightField(
            center, env["peak_intensity"], env["radius_of_support"], env["profile"]
        ))
        arena = self._checked(
            "environment", lambda: Arena.centered(center, env["arena_half_width"])
        )
        coverage = CoverageSpec(**self._config["coverage"])
        if exp["biases"]:
            biases = exp["biases"]
        else:
            biases = self._checked("experiment", lambda: bias_grid(
                exp["bias_lo"], exp["bias_hi"], exp["n_robots"]
            ))
        if exp["seed"] is None:
            raise ConfigError("master seed is unresolved", section="experiment", key="seed")
        return self._checked("experiment", lambda: ExperimentConfig(
            biases=biases,
            n_mc=exp["n_mc"],
            duration=exp["duration"],
            dt=exp["dt"],
            controller=controller,
            robot=robot_params,
            light=light,
            arena=arena,
            bounded=env["bounded"],
            coverage=coverage,
            master_seed=exp["seed"],
            mirror=exp["mirror"],
        ))

    def resolve_p_right_values(self) -> Tuple[float, ...]:
        """Turn probabilities a sweep iterates over; empty means a single sweep at p_right."""
        values = self._config["phototaxis"]["p_right_values"]
        for value in values:
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"p_right_values entries must lie in [0, 1], got {value}",
                                  source=self.source, section="phototaxis", key="p_right_values",
                                  line=_find_line(self.source, "phototaxis", "p_right_values"))
        return tuple(values)

    def resolve_oscillators(self) -> "OscillatorSettings":
        return self._checked(
            "oscillators", lambda: OscillatorSettings(**self._config["oscillators"])
        )

    def resolve_sensing(self) -> "SensingSettings":
        return self._checked("sensing", lambda: SensingSettings(**self._config["sensing"]))


@dataclass(frozen=True)
class OscillatorSettings:
    n: int = DEFAULT_POPULATION
    pulse_rate: float = DEFAULT_PULSE_RATE
    spread: float = DEFAULT_PULSE_SPREAD
    coupling: float = 0.0
    coupling_values: Tuple[float, ...] = ()
    topology: str = Topology.ALL_TO_ALL
    duration: float = 600.0
    dt: float = DEFAULT_OSCILLATOR_DT
    repetitions: int = 4
    record_every: int = 10
    synchronized: bool = True

    def __post_init__(self):
        if self.n < 1 or self.repetitions < 1 or self.record_every < 1:
            raise ConfigError("n, repetitions and record_every must be >= 1")
        if self.topology not in Topology.ALL:
            raise ConfigError(f"unknown topology '{self.topology}'")
        if self.topology == Topology.LATTICE and math.isqrt(self.n) ** 2 != self.n:
            raise ConfigError(f"lattice topology needs a perfect-square n, got {self.n}")
        if self.dt <= 0 or self.duration < self.dt:
            raise ConfigError("need dt > 0 and duration >= dt")
        if self.spread < 0 or self.coupling < 0 or any(k < 0 for k in self.coupling_values):
            raise ConfigError("spread and coupling strengths must be >= 0")


@dataclass(frozen=True)
class SensingSettings:
    n_sensors: int = 12
    repetitions: int = 4
    samples_per_rep: int = 100
    gain_sd: float = 0.05
    offset_sd: float = 10.0
    reading_noise: float = 0.0
    stimulus_scale: float = float(SENSOR_MAX)
    period_index: int = 0
    homogeneous: bool = False
    thresholds: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.n_sensors < 1:
            raise ConfigError(f"n_sensors must be >= 1, got {self.n_sensors}")
        if not 0 <= self.period_index < self.repetitions:
            raise ConfigError(
                f"period_index must lie in [0, {self.repetitions - 1}], got {self.period_index}"
            )
        if min(self.gain_sd, self.offset_sd, self.reading_noise) < 0:
            raise ConfigError("gain_sd, offset_sd and reading_noise must be >= 0")
