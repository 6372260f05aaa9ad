"""
Random stream management for reproducible, order-independent simulations.

Every trial owns a private stream derived from (master_seed, robot_id,
trial_id) through numpy's SeedSequence hashing, so results never depend on
which worker ran a trial or in what order.
"""

from typing import NamedTuple, Tuple

import numpy as np

from ..core.constants import MOTOR_NOISE_BLOCK


def random_master_seed() -> int:
    """Draw a fresh 64-bit master seed from OS entropy."""
    return int(np.random.SeedSequence().generate_state(1, np.uint64)[0])


def trial_seed(master_seed: int, robot_id: int, trial_id: int) -> int:
    """Stable 64-bit child seed for one (robot, trial) work item."""
    sequence = np.random.SeedSequence([int(master_seed), int(robot_id), int(trial_id)])
    return int(sequence.generate_state(1, np.uint64)[0])


def derived_rng(master_seed: int, *keys: int) -> np.random.Generator:
    """Generator for a named sub-task (e.g. shared initial poses, sensor fleets)."""
    return np.random.default_rng(np.random.SeedSequence([int(master_seed), *map(int, keys)]))


class MotorNoise:
    """
    Standard-normal pairs for the right and left motors, two per control step.

    Draws are taken from the generator in blocks of shape ``(block, 2)``;
    column 0 feeds the right motor, column 1 the left. A reflected stream
    swaps the columns.
    """

    def __init__(self, generator: np.random.Generator, reflected: bool = False,
                 block: int = MOTOR_NOISE_BLOCK):
        self._generator = generator
        self.reflected = reflected
        self._block = block
        self._buffer = []
        self._index = 0

    def draw_pair(self) -> Tuple[float, float]:
        if self._index >= len(self._buffer):
            self._buffer = self._generator.standard_normal((self._block, 2)).tolist()
            self._index = 0
        z_r, z_l = self._buffer[self._index]
        self._index += 1
        if self.reflected:
            return z_l, z_r
        return z_r, z_l


class DecisionStream:
    """Uniform-based draws for controller decisions; reflection mirrors left/right."""

    def __init__(self, generator: np.random.Generator, reflected: bool = False):
        self._generator = generator
        self.reflected = reflected

    def uniform(self) -> float:
        u = float(self._generator.random())
        return 1.0 - u if self.reflected else u

    def bernoulli(self, p: float) -> bool:
        return self.uniform() < p

    def exponential(self, mean: float) -> float:
        return float(self._generator.exponential(mean))

    def symmetric(self, half_width: float) -> float:
        """Uniform draw on (-half_width, half_width); negated when reflected."""
        value = half_width * (2.0 * float(self._generator.random()) - 1.0)
        return -value if self.reflected else value


class TrialStreams(NamedTuple):
    motor: MotorNoise
    decisions: DecisionStream


def streams_from_seed(seed: int, reflected: bool = False) -> TrialStreams:
    motor_seq, decision_seq = np.random.SeedSequence(int(seed)).spawn(2)
    return TrialStreams(
        MotorNoise(np.random.default_rng(motor_seq), reflected),
        DecisionStream(np.random.default_rng(decision_seq), reflected),
    )


def trial_streams(master_seed: int, robot_id: int, trial_id: int,
                  reflected: bool = False) -> TrialStreams:
    """Private motor-noise and decision streams of one trial."""
    return streams_from_seed(trial_seed(master_seed, robot_id, trial_id), reflected)
