"""
Constants used throughout the simulator
"""

import math

# Application information
APP_NAME = "KiloSwarm"
APP_VERSION = "1.0.1"

# Motor model defaults (nominal rate units)
DEFAULT_NOMINAL_RATE = 0.5
DEFAULT_MAX_RATE = 1.0
DEFAULT_C_V = 0.01  # m/s per unit rate
DEFAULT_C_OMEGA = 1.0  # rad/s per unit rate
DEFAULT_SIGMA_MOTOR = 0.005
DELTA_MAX = 0.04

# Protocol timing
DEFAULT_DT = 0.1
DEFAULT_DURATION = 200.0
COST_WINDOW = 100

# Light field and arena (meters, intensity units on the 0-1023 scale)
DEFAULT_PEAK_INTENSITY = 1023.0
DEFAULT_SUPPORT_RADIUS = 1.5
DEFAULT_ARENA_HALF_WIDTH = 1.0

# Coverage raster
DEFAULT_CELL_SIZE = 0.01
KILOBOT_RADIUS = 0.0165

# Phototaxis defaults
DEFAULT_P_RIGHT = 0.5
DEFAULT_FORWARD_DURATION = 1.0
DEFAULT_TURN_DURATION = 0.5
DEFAULT_SAMPLE_PERIOD = 0.5
DEFAULT_STOP_THRESHOLD = 2.0

# Random walk defaults
DEFAULT_MEAN_RUN_DURATION = 20.0
DEFAULT_TURN_ANGLE_RANGE = math.pi / 2
DEFAULT_TURN_RATE = DEFAULT_C_OMEGA * DEFAULT_NOMINAL_RATE

# Sensor range
SENSOR_MIN = 0
SENSOR_MAX = 1023

# Oscillator clock
PULSES_PER_CYCLE = 60.0
PULSES_PER_COLOR = 30.0
DEFAULT_PULSE_RATE = 30.0
DEFAULT_PULSE_SPREAD = 0.03
DEFAULT_POPULATION = 49
DEFAULT_OSCILLATOR_DT = 0.01

# Stream derivation: sub-task keys mixed with the master seed
MOTOR_NOISE_BLOCK = 4096
INITIALS_STREAM_KEY = 0
FLEET_STREAM_KEY = 1
SENSOR_STREAM_KEY = 2
OSCILLATOR_STREAM_KEY = 3
BOOTSTRAP_STREAM_KEY = 4

# Acceptability threshold highlighted in the cost figures (meters)
DEFAULT_DELTA_ACC = 0.75


# Controller kinds
class ControllerKind:
    STRAIGHT = "straight"
    PHOTOTAXIS = "phototaxis"
    RANDOM_WALK = "random_walk"

    ALL = (STRAIGHT, PHOTOTAXIS, RANDOM_WALK)


# Light-field profiles
class Profile:
    CONE = "cone"
    GAUSSIAN = "gaussian"

    ALL = (CONE, GAUSSIAN)


# Controller modes
class Mode:
    FORWARD = "forward"
    TURNING = "turning"
    STOPPED = "stopped"


# Turn directions
class Turn:
    LEFT = "left"
    RIGHT = "right"


# Oscillator colors
class Color:
    RED = "red"
    BLUE = "blue"


# Oscillator coupling topologies
class Topology:
    ALL_TO_ALL = "all-to-all"
    LATTICE = "lattice"

    ALL = (ALL_TO_ALL, LATTICE)


# CSV schemas
TRAJECTORY_COLUMNS = ["t", "x", "y", "theta"]
RESULT_COLUMNS = [
    "robot_id",
    "bias",
    "trial_id",
    "cost",
    "coverage",
    "stopped",
    "final_x",
    "final_y",
    "final_theta",
]
MEAN_COST_COLUMNS = ["bias", "mean_cost"]
ACCEPTABILITY_COLUMNS = ["delta_acc", "r_acc", "n_acc"]
COVERAGE_SUMMARY_COLUMNS = ["cells_total", "cells_visited", "fraction"]
COVERAGE_COLUMNS = ["robot_id", "trial_id"] + COVERAGE_SUMMARY_COLUMNS
RESPONSE_COLUMNS = ["robot_id", "sample_index", "v_value", "reading"]
HISTORY_COLUMNS = ["t", "osc_id", "phase", "color"]
SWITCH_COLUMNS = ["osc_id", "natural_rate", "switch_count"]
ORDER_COLUMNS = ["t", "r", "blue_fraction"]
INDEX_COLUMNS = ["robot_id", "trial_id", "path"]
ESTIMATE_COLUMNS = ["robot_id", "mu_i", "sigma_i", "n_trials"]


# Plot kinds and the columns each one needs
class PlotKind:
    TRAJECTORIES = "trajectories"
    ESTIMATES = "estimates"
    COST = "cost"
    ACCEPTABILITY = "acceptability"
    RESPONSE = "response"
    AGREEMENT = "agreement"
    RATIO = "ratio"
    ORDER = "order"
    COVERAGE = "coverage"


PLOT_SCHEMAS = {
    PlotKind.TRAJECTORIES: TRAJECTORY_COLUMNS,
    PlotKind.ESTIMATES: ESTIMATE_COLUMNS,
    PlotKind.COST: ["bias", "cost"],
    PlotKind.ACCEPTABILITY: ACCEPTABILITY_COLUMNS,
    PlotKind.RESPONSE: RESPONSE_COLUMNS,
    PlotKind.AGREEMENT: ["threshold", "count"],
    PlotKind.RATIO: ["t", "osc_id", "color"],
    PlotKind.ORDER: ["t", "r"],
    PlotKind.COVERAGE: ["bias", "coverage"],
}

# Chart colors for consistent visualization
CHART_COLORS = [
    "#1976D2",  # Blue
    "#388E3C",  # Green
    "#D32F2F",  # Red
    "#FFA000",  # Amber
    "#7B1FA2",  # Purple
    "#00796B",  # Teal
    "#C2185B",  # Pink
    "#00ACC1",  # Cyan
]
LEFT_BIAS_COLOR = "#D32F2F"
RIGHT_BIAS_COLOR = "#1976D2"
